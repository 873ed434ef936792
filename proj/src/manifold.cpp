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

#include "bdcpm/manifold.hpp"

#include <cmath>
#include <string>

namespace bdcpm
{

namespace
{
constexpr double pi = 3.14159265358979323846;
}

void require_dense(std::size_t rows, std::size_t cols, std::size_t cap)
{
    if (rows != 0 && cols > cap / rows)
        throw Error(ErrorCode::ScaleTooLarge,
                    "dense " + std::to_string(rows) + "x" + std::to_string(cols) + " exceeds cap " + std::to_string(cap));
}

arma::cx_vec steering_vector_z(double u, std::size_t M)
{
    arma::cx_vec v(M);
    for (std::size_t m = 0; m < M; ++m)
        v(m) = std::polar(1.0, -pi * u * double(m));
    return v;
}

arma::cx_vec steering_vector_x(double v, std::size_t M)
{
    return steering_vector_z(v, M);
}

arma::cx_vec delay_basis(double tau, double delta_f, std::size_t M_p)
{
    arma::cx_vec b(M_p);
    for (std::size_t m = 0; m < M_p; ++m)
        b(m) = std::polar(1.0, -2.0 * pi * double(m) * delta_f * tau);
    return b;
}

double grid_cosine(std::size_t k, std::size_t N)
{
    return -1.0 + 2.0 * double(k) / double(N);
}

double grid_delay(std::size_t l, std::size_t N_p, double delta_f)
{
    return double(l) / (double(N_p) * delta_f);
}

GridSet build_grids(const SystemConfig &cfg, const DerivedDims &dims)
{
    GridSet g;
    g.V_z.set_size(dims.M_rz, dims.N_z);
    for (std::size_t k = 0; k < dims.N_z; ++k)
        g.V_z.col(k) = steering_vector_z(grid_cosine(k, dims.N_z), dims.M_rz);

    g.V_x.set_size(dims.M_rx, dims.N_x);
    for (std::size_t k = 0; k < dims.N_x; ++k)
        g.V_x.col(k) = steering_vector_x(grid_cosine(k, dims.N_x), dims.M_rx);

    g.V = arma::kron(g.V_z, g.V_x);

    // The delay product m * l is reduced mod N_p before the phase is formed so that
    // entries are exact DFT roots independent of delta_f rounding.
    g.U.set_size(dims.M_p, dims.N_p);
    for (std::size_t l = 0; l < dims.N_p; ++l)
        for (std::size_t m = 0; m < dims.M_p; ++m)
            g.U(m, l) = std::polar(1.0, -2.0 * pi * double((m * l) % dims.N_p) / double(dims.N_p));

    g.U_f = g.U.cols(0, dims.N_f - 1);
    (void)cfg;
    return g;
}

arma::mat cyclic_permutation(std::size_t N, std::size_t n)
{
    arma::mat P(N, N, arma::fill::zeros);
    for (std::size_t i = 0; i < N; ++i)
        P(i, (i + n) % N) = 1.0;
    return P;
}

arma::mat selector(std::size_t M, std::size_t N)
{
    return arma::eye<arma::mat>(M, N);
}

arma::cx_mat delay_block_embed(const std::vector<arma::cx_mat> &blocks, std::size_t N_p)
{
    if (blocks.empty())
        throw Error(ErrorCode::BadDimension, "no blocks");
    const auto N_r = blocks[0].n_rows;
    const auto N_f = blocks[0].n_cols;
    if (blocks.size() * N_f > N_p)
        throw Error(ErrorCode::BlockOverflow,
                    std::to_string(blocks.size()) + " blocks of width " + std::to_string(N_f) + " exceed " + std::to_string(N_p));

    arma::cx_mat out(N_r, N_p, arma::fill::zeros);
    for (std::size_t p = 0; p < blocks.size(); ++p)
    {
        if (blocks[p].n_rows != N_r || blocks[p].n_cols != N_f)
            throw Error(ErrorCode::BadDimension, "blocks must share one shape");
        if (N_f > 0)
            out.cols(p * N_f, (p + 1) * N_f - 1) = blocks[p];
    }
    return out;
}

} // namespace bdcpm
