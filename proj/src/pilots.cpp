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

#include "bdcpm/pilots.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace bdcpm
{

namespace
{
constexpr double pi = 3.14159265358979323846;
}

bool is_prime(std::size_t n)
{
    if (n < 2)
        return false;
    for (std::size_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

std::size_t largest_prime_below(std::size_t n)
{
    for (std::size_t c = n; c-- > 2;)
        if (is_prime(c))
            return c;
    throw Error(ErrorCode::BadDimension, "no prime below " + std::to_string(n));
}

arma::cx_vec zc_sequence(std::size_t root, std::size_t M_p)
{
    const std::size_t N_l = largest_prime_below(M_p);
    if (root < 1 || root >= N_l || std::gcd(root, N_l) != 1)
        throw Error(ErrorCode::BadRoot, "root " + std::to_string(root) + " invalid for N_l = " + std::to_string(N_l));

    // The phase root n (n+1) / N_l is periodic mod 2 N_l; reduce before converting to keep it exact.
    arma::cx_vec x(M_p);
    const std::size_t period = 2 * N_l;
    for (std::size_t n = 0; n < M_p; ++n)
    {
        const std::size_t k = (root * ((n * (n + 1)) % period)) % period;
        x(n) = std::polar(1.0, -pi * double(k) / double(N_l));
    }
    return x;
}

std::vector<std::size_t> select_roots(std::size_t Q, std::size_t N_l)
{
    std::vector<std::size_t> r;
    for (std::size_t c = 1; c < N_l && r.size() < Q; ++c)
        if (std::gcd(c, N_l) == 1)
            r.push_back(c);
    if (r.size() < Q)
        throw Error(ErrorCode::BadRoot, "only " + std::to_string(r.size()) + " roots available for N_l = " + std::to_string(N_l));
    return r;
}

double pilot_shift_delay(std::size_t p, const DerivedDims &dims, double delta_f)
{
    return double(p * dims.N_f) / (double(dims.N_p) * delta_f);
}

PilotSet build_pilot_matrix(const std::vector<arma::cx_vec> &x_tilde, const SystemConfig &cfg,
                            const DerivedDims &dims, const GridSet &grids)
{
    if (x_tilde.size() != dims.Q)
        throw Error(ErrorCode::BadDimension, "need one base sequence per root");

    PilotSet ps;
    ps.x_tilde = x_tilde;
    ps.P_mat.set_size(dims.Q * dims.N_p, dims.M_p);
    ps.x_user.resize(dims.Q);

    const arma::cx_mat Ut = grids.U.st();
    for (std::size_t q = 0; q < dims.Q; ++q)
    {
        if (x_tilde[q].n_elem != dims.M_p)
            throw Error(ErrorCode::BadDimension, "base sequence length must be M_p");
        ps.P_mat.rows(q * dims.N_p, (q + 1) * dims.N_p - 1) = Ut.each_row() % x_tilde[q].st();

        // Shift p N_f lands exactly on a grid column, so the basis is column p N_f of U.
        for (std::size_t p = 0; p < dims.P_per_root[q]; ++p)
            ps.x_user[q].push_back(x_tilde[q] % grids.U.col((p * dims.N_f) % dims.N_p));
    }
    (void)cfg;
    return ps;
}

PilotSet build_pilot_matrix(const SystemConfig &cfg, const DerivedDims &dims, const GridSet &grids)
{
    const std::size_t N_l = largest_prime_below(dims.M_p);
    const auto roots = select_roots(dims.Q, N_l);
    std::vector<arma::cx_vec> seqs;
    for (auto r : roots)
        seqs.push_back(zc_sequence(r, dims.M_p));
    PilotSet ps = build_pilot_matrix(seqs, cfg, dims, grids);
    ps.roots = roots;
    ps.N_l = N_l;
    return ps;
}

} // namespace bdcpm
