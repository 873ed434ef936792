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

#ifndef BDCPM_CHEST_HPP
#define BDCPM_CHEST_HPP

#include <armadillo>
#include <cstddef>
#include <vector>

#include "bdcpm/forward_op.hpp"
#include "bdcpm/manifold.hpp"
#include "bdcpm/pilots.hpp"
#include "bdcpm/sysmodel.hpp"

namespace bdcpm
{

enum class MmseSolver
{
    Direct,
    Iterative
};

struct MmseOptions
{
    MmseSolver solver = MmseSolver::Direct;
    std::size_t max_dim = 4096;     // cap on M_r M_p for the direct solver
    std::size_t max_iter = 1000;    // conjugate gradient iterations
    double cg_tol = 1e-8;           // relative residual target
};

// Linear MMSE estimate of the stacked beam-domain matrix under a diagonal Gaussian prior:
// g = D A^H (A D A^H + sigma_z2 I)^{-1} y. The direct solver factors the system once.
class MmseEstimator
{
public:
    MmseEstimator(ForwardOperator op, arma::mat omega_stacked, double sigma_z2, MmseOptions opts = MmseOptions{});

    arma::cx_mat estimate_G(const arma::cx_mat &Y) const;

    // Iterations used by the last iterative solve (0 for direct).
    std::size_t last_iterations() const { return last_iters_; }

    const ForwardOperator &op() const { return op_; }
    const arma::mat &omega() const { return omega_; }

private:
    arma::cx_mat apply_system(const arma::cx_mat &Z) const;

    ForwardOperator op_;
    arma::mat omega_;
    double sigma_z2_;
    MmseOptions opts_;
    arma::cx_mat chol_; // upper Cholesky factor, direct solver only
    mutable std::size_t last_iters_ = 0;
};

// Per-user space-frequency channels V G_k U_f^T for one symbol.
std::vector<arma::cx_mat> mmse_estimate(const arma::cx_mat &Y, const arma::mat &omega_stacked, const GridSet &grids,
                                        const PilotSet &pilots, const DerivedDims &dims, double sigma_z2,
                                        const MmseOptions &opts = MmseOptions{});

enum class DbBase
{
    Log10,
    Log2 // compatibility output, 10 log2(x)
};

// Power ratio in dB with a -300 dB floor for zero.
double to_db(double x, DbBase base = DbBase::Log10);

// 10 log10 of the mean over all (t, k) of ||H_hat - H||_F^2. H[t][k].
double mse_metric(const std::vector<std::vector<arma::cx_mat>> &H_hat, const std::vector<std::vector<arma::cx_mat>> &H_truth,
                  DbBase base = DbBase::Log10);

} // namespace bdcpm

#endif
