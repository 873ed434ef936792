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

#ifndef BDCPM_PILOTS_HPP
#define BDCPM_PILOTS_HPP

#include <armadillo>
#include <cstddef>
#include <vector>

#include "bdcpm/manifold.hpp"
#include "bdcpm/sysmodel.hpp"

namespace bdcpm
{

struct PilotSet
{
    std::vector<std::size_t> roots;
    std::vector<arma::cx_vec> x_tilde;             // Q base sequences, length M_p
    std::vector<std::vector<arma::cx_vec>> x_user; // [q][p], length M_p
    arma::cx_mat P_mat;                            // Q N_p x M_p, block q = U^T diag(x_tilde[q])
    std::size_t N_l = 0;
};

bool is_prime(std::size_t n);

// Throws BadDimension when no prime below n exists.
std::size_t largest_prime_below(std::size_t n);

// [x]_n = exp(-j pi root n (n+1) / N_l), n = 0..M_p-1, with N_l the largest prime below M_p.
arma::cx_vec zc_sequence(std::size_t root, std::size_t M_p);

// First Q integers >= 1 coprime to N_l.
std::vector<std::size_t> select_roots(std::size_t Q, std::size_t N_l);

// Cyclic-shift delay of user p (0-based): p N_f / (N_p delta_f). User p then occupies
// delay columns [p N_f, (p+1) N_f) of its root block.
double pilot_shift_delay(std::size_t p, const DerivedDims &dims, double delta_f);

PilotSet build_pilot_matrix(const SystemConfig &cfg, const DerivedDims &dims, const GridSet &grids);

// Same construction from caller-supplied base sequences.
PilotSet build_pilot_matrix(const std::vector<arma::cx_vec> &x_tilde, const SystemConfig &cfg,
                            const DerivedDims &dims, const GridSet &grids);

} // namespace bdcpm

#endif
