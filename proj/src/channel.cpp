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

#include "bdcpm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bdcpm
{

BeamPowerMap BeamPowerMap::from_omega(const arma::mat &omega)
{
    BeamPowerMap b;
    b.omega = omega;
    b.m_root = arma::sqrt(omega);
    // Re-square so that m_root % m_root reproduces omega bit for bit.
    b.omega = b.m_root % b.m_root;
    return b;
}

double BeamPowerMap::support_fraction(double rel) const
{
    if (omega.is_empty())
        return 0.0;
    const double thr = rel * omega.max();
    return double(arma::accu(omega > thr)) / double(omega.n_elem);
}

namespace
{

arma::vec wrapped_gaussian(std::size_t N, std::size_t center, double spread)
{
    arma::vec g(N);
    for (std::size_t i = 0; i < N; ++i)
    {
        const std::size_t a = i > center ? i - center : center - i;
        const double d = double(std::min(a, N - a));
        g(i) = std::exp(-d * d / (2.0 * spread * spread));
    }
    return g;
}

} // namespace

BeamPowerMap synth_power_map(const DerivedDims &dims, const SynthParams &params, Rng &rng)
{
    if (params.n_clusters < 1 || !(params.angle_spread > 0.0) || !(params.delay_spread > 0.0))
        throw Error(ErrorCode::BadDimension, "need at least one cluster and positive spreads");

    arma::mat omega(dims.N_r, dims.N_f, arma::fill::zeros);
    for (std::size_t c = 0; c < params.n_clusters; ++c)
    {
        std::uniform_int_distribution<std::size_t> dz(0, dims.N_z - 1), dx(0, dims.N_x - 1), dd(0, dims.N_f - 1);
        const std::size_t cz = dz(rng), cx = dx(rng), cd = dd(rng);

        const arma::vec gz = wrapped_gaussian(dims.N_z, cz, params.angle_spread);
        const arma::vec gx = wrapped_gaussian(dims.N_x, cx, params.angle_spread);
        const arma::vec ang = arma::kron(gz, gx);

        arma::rowvec del(dims.N_f, arma::fill::zeros);
        for (std::size_t l = cd; l < dims.N_f; ++l)
            del(l) = std::exp(-double(l - cd) / params.delay_spread);

        omega += ang * del;
    }

    omega *= double(dims.N_f) / arma::accu(omega);
    const double thr = 1e-8 * omega.max();
    omega.elem(arma::find(omega < thr)).zeros();
    // Clipping removes a negligible mass; restore the exact total.
    omega *= double(dims.N_f) / arma::accu(omega);
    return BeamPowerMap::from_omega(omega);
}

ChannelRealization realize_channel(const BeamPowerMap &map, const GridSet &grids, Rng &rng)
{
    ChannelRealization r;
    r.G.set_size(map.m_root.n_rows, map.m_root.n_cols);
    for (arma::uword i = 0; i < r.G.n_elem; ++i)
        r.G(i) = map.m_root(i) * cgauss(rng);
    r.H = grids.V * r.G * grids.U_f.st();
    return r;
}

ReceiveBatch simulate_rx(const std::vector<BeamPowerMap> &maps, const PilotSet &pilots, const GridSet &grids,
                         const DerivedDims &dims, std::size_t T, double sigma_z2, std::uint64_t seed,
                         const SimOptions &opts)
{
    const auto slots = user_slots(dims);
    if (maps.size() != slots.size())
        throw Error(ErrorCode::BadDimension, "got " + std::to_string(maps.size()) + " maps for " + std::to_string(slots.size()) + " users");
    for (const auto &m : maps)
        if (m.omega.n_rows != dims.N_r || m.omega.n_cols != dims.N_f)
            throw Error(ErrorCode::BadDimension, "map shape must be N_r x N_f");
    if (!(sigma_z2 >= 0.0))
        throw Error(ErrorCode::BadDimension, "sigma_z2 must be >= 0");
    if (pilots.P_mat.n_rows != dims.stacked_cols() || pilots.P_mat.n_cols != dims.M_p)
        throw Error(ErrorCode::BadDimension, "pilot matrix does not match dims");

    ReceiveBatch b;
    b.sigma_z2 = sigma_z2;
    b.seed = seed;
    b.Y.resize(T);
    b.G_truth.resize(T);
    if (opts.store_H)
        b.H_truth.resize(T);

    const double sz = std::sqrt(sigma_z2);
    const double target = double(dims.M_r * dims.M_p);

    for (std::size_t t = 0; t < T; ++t)
    {
        Rng rng = make_rng(seed, t);
        arma::cx_mat G(dims.N_r, dims.stacked_cols(), arma::fill::zeros);
        arma::cx_mat Ysum(dims.M_r, dims.M_p, arma::fill::zeros);
        std::vector<arma::cx_mat> Hs;

        for (std::size_t k = 0; k < slots.size(); ++k)
        {
            ChannelRealization ch = realize_channel(maps[k], grids, rng);
            if (opts.renormalize)
            {
                const double e = arma::accu(arma::square(arma::abs(ch.H)));
                if (e > 0.0)
                {
                    const double s = std::sqrt(target / e);
                    ch.G *= s;
                    ch.H *= s;
                }
            }
            const auto c0 = user_column(dims, slots[k].q, slots[k].p);
            G.cols(c0, c0 + dims.N_f - 1) = ch.G;
            const arma::cx_vec &x = pilots.x_user[slots[k].q][slots[k].p];
            Ysum += ch.H.each_row() % x.st();
            if (opts.store_H)
                Hs.push_back(std::move(ch.H));
        }

        arma::cx_mat Z(dims.M_r, dims.M_p);
        for (arma::uword i = 0; i < Z.n_elem; ++i)
            Z(i) = sz * cgauss(rng);

        arma::cx_mat Y = grids.V * G * pilots.P_mat;
        Ysum += Z;
        Y += Z;

        const double ref = arma::norm(Y, "fro");
        const double diff = arma::norm(Y - Ysum, "fro");
        if (diff > opts.layout_tol * std::max(ref, 1e-300) && diff > 0.0)
            throw Error(ErrorCode::LayoutMismatch,
                        "per-user and stacked receive forms differ by " + std::to_string(diff / ref) + " at t = " + std::to_string(t));

        b.Y[t] = std::move(Y);
        b.G_truth[t] = std::move(G);
        if (opts.store_H)
            b.H_truth[t] = std::move(Hs);
    }
    return b;
}

std::vector<arma::cx_mat> user_channels(const arma::cx_mat &G_stacked, const GridSet &grids, const DerivedDims &dims)
{
    std::vector<arma::cx_mat> out;
    const arma::cx_mat Uft = grids.U_f.st();
    for (const auto &s : user_slots(dims))
    {
        const auto c0 = user_column(dims, s.q, s.p);
        out.push_back(grids.V * G_stacked.cols(c0, c0 + dims.N_f - 1) * Uft);
    }
    return out;
}

} // namespace bdcpm
