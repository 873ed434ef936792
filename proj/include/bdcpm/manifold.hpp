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

#ifndef BDCPM_MANIFOLD_HPP
#define BDCPM_MANIFOLD_HPP

#include <armadillo>
#include <cstddef>
#include <vector>

#include "bdcpm/sysmodel.hpp"

namespace bdcpm
{

// Steering and basis vectors carry unit-modulus entries, so a square grid satisfies
// V^H V = M I rather than I. FFT code paths fold the resulting constants in explicitly.
enum class GridConvention
{
    UnitModulus
};

struct GridSet
{
    arma::cx_mat V_z; // M_rz x N_z
    arma::cx_mat V_x; // M_rx x N_x
    arma::cx_mat V;   // M_r x N_r, kron(V_z, V_x); column iz * N_x + ix
    arma::cx_mat U;   // M_p x N_p
    arma::cx_mat U_f; // M_p x N_f
    GridConvention convention = GridConvention::UnitModulus;
};

// Largest N_r * N_p for which dense N_r x N_r or N_p x N_p style products are allowed.
inline constexpr std::size_t default_dense_cap = std::size_t{1} << 22;

// Throws ScaleTooLarge when rows * cols exceeds cap.
void require_dense(std::size_t rows, std::size_t cols, std::size_t cap = default_dense_cap);

// Entry m = exp(-j pi u m); half-wavelength spacing.
arma::cx_vec steering_vector_z(double u, std::size_t M);
arma::cx_vec steering_vector_x(double v, std::size_t M);

// Entry m = exp(-j 2 pi m delta_f tau), m = 0..M_p-1.
arma::cx_vec delay_basis(double tau, double delta_f, std::size_t M_p);

// u_k = -1 + 2k/N, k = 0..N-1.
double grid_cosine(std::size_t k, std::size_t N);

// tau_l = l / (N_p delta_f), l = 0..N_p-1 (0-based).
double grid_delay(std::size_t l, std::size_t N_p, double delta_f);

GridSet build_grids(const SystemConfig &cfg, const DerivedDims &dims);

// Cyclic shift Pi_N^n with [Pi]_{i,j} = 1 iff j = (i + n) mod N.
arma::mat cyclic_permutation(std::size_t N, std::size_t n);

// I_{M,N}: the first M rows of the N x N identity.
arma::mat selector(std::size_t M, std::size_t N);

// Places block p into columns [p N_f, (p+1) N_f) of an N_r x N_p matrix.
arma::cx_mat delay_block_embed(const std::vector<arma::cx_mat> &blocks, std::size_t N_p);

} // namespace bdcpm

#endif
