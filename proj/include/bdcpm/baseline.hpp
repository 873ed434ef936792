// SPDX-License-Identifier: Apache-2.0
//
// bdcpm - beam-domain channel power estimation for massive MIMO uplink
// Copyright (C) 2026 The bdcpm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BDCPM_BASELINE_HPP
#define BDCPM_BASELINE_HPP

#include <armadillo>
#include <cstddef>
#include <vector>

#include "bdcpm/forward_op.hpp"

namespace bdcpm
{

struct MmvProblem
{
    ForwardOperator dictionary;          // g -> vec(V G P)
    std::vector<arma::cx_mat> observations;
    double p_norm = 0.8;
    double lambda_reg = 0.0;             // <= 0 selects sigma_z2 M_r M_p when regularized
    double sigma_z2 = 0.0;
    bool regularized = true;             // false: pseudo-inverse steps, for noiseless data
    std::size_t max_dim = 4096;          // largest M_r M_p handled with dense solves
};

struct MfocussResult
{
    std::vector<arma::cx_mat> G_est;
    arma::mat omega_hat;                 // mean over t of |G_est|^2
    std::vector<double> trace;           // ||Y - A X||^2 + (2 lambda / p) sum_i ||x_i||^p
    std::size_t iters = 0;
    bool converged = false;
};

// Reweighted minimum-norm iteration over all snapshots jointly. Row i of the MMV system
// is one beam-domain coefficient across the T snapshots.
MfocussResult mfocuss(const MmvProblem &problem, std::size_t max_iter = 30, double tol = 1e-4);

} // namespace bdcpm

#endif
