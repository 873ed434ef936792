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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "bdcpm/channel.hpp"
#include "bdcpm/chest.hpp"
#include "bdcpm/powerest.hpp"
#include "testutil.hpp"

using namespace bdcpm;

namespace
{

struct Setup
{
    SystemConfig cfg;
    DerivedDims d;
    GridSet g;
    PilotSet ps;
};

Setup make_setup(double fine, long Q, long P)
{
    Setup s;
    s.cfg = desk_config();
    s.cfg.N_az = s.cfg.N_ax = s.cfg.N_ap = fine;
    s.cfg.Q = Q;
    s.cfg.P_per_root.assign(std::size_t(Q), P);
    s.d = validate(s.cfg);
    s.g = build_grids(s.cfg, s.d);
    s.ps = build_pilot_matrix(s.cfg, s.d, s.g);
    return s;
}

std::vector<BeamPowerMap> random_maps(const DerivedDims &d, Rng &rng)
{
    std::vector<BeamPowerMap> maps;
    for (std::size_t k = 0; k < d.K; ++k)
        maps.push_back(synth_power_map(d, SynthParams{}, rng));
    return maps;
}

} // namespace

TEST_CASE("Zero prior gives zero channels")
{
    const Setup s = make_setup(2.0, 1, 6);
    Rng rng = make_rng(51);
    const arma::cx_mat Y = testutil::rand_cx(rng, s.d.M_r, s.d.M_p);
    const arma::mat omega(s.d.N_r, s.d.stacked_cols(), arma::fill::zeros);
    for (auto solver : {MmseSolver::Direct, MmseSolver::Iterative})
    {
        MmseOptions o;
        o.solver = solver;
        const auto H = mmse_estimate(Y, omega, s.g, s.ps, s.d, 0.1, o);
        REQUIRE(H.size() == s.d.K);
        for (const auto &h : H)
            CHECK(arma::abs(h).max() == 0.0);
    }
}

TEST_CASE("Noiseless full-support square instance reproduces the channel")
{
    const Setup s = make_setup(1.0, 1, 6);
    Rng rng = make_rng(52);
    const auto maps = random_maps(s.d, rng);
    SimOptions so;
    so.store_H = true;
    const auto b = simulate_rx(maps, s.ps, s.g, s.d, 2, 0.0, 9, so);
    const arma::mat omega(s.d.N_r, s.d.stacked_cols(), arma::fill::ones);
    for (std::size_t t = 0; t < 2; ++t)
    {
        const auto H = mmse_estimate(b.Y[t], omega, s.g, s.ps, s.d, 1e-13);
        for (std::size_t k = 0; k < s.d.K; ++k)
            CHECK(testutil::rel_fro(H[k], b.H_truth[t][k]) <= 1e-6);
    }
}

TEST_CASE("Iterative and direct solves agree")
{
    for (long Q : {1L, 2L})
    {
        const Setup s = make_setup(2.0, Q, 6);
        Rng rng = make_rng(53 + std::uint64_t(Q));
        const auto maps = random_maps(s.d, rng);
        const auto b = simulate_rx(maps, s.ps, s.g, s.d, 3, 1e-2, 10);
        arma::mat omega = embed_per_user(maps, s.d);
        const ForwardOperator A(s.g.V, s.ps.P_mat);
        const MmseEstimator direct(A, omega, 1e-2);
        MmseOptions o;
        o.solver = MmseSolver::Iterative;
        o.cg_tol = 1e-12;
        o.max_iter = 5000;
        const MmseEstimator cg(A, omega, 1e-2, o);
        for (const auto &y : b.Y)
        {
            const arma::cx_mat gd = direct.estimate_G(y), gc = cg.estimate_G(y);
            CHECK(testutil::rel_fro(gc, gd) <= 1e-8);
            CHECK(cg.last_iterations() > 0);
        }
    }
}

TEST_CASE("Estimate satisfies the weighted normal equation")
{
    const Setup s = make_setup(2.0, 2, 6);
    Rng rng = make_rng(55);
    const auto maps = random_maps(s.d, rng);
    const auto b = simulate_rx(maps, s.ps, s.g, s.d, 4, 0.05, 11);
    const arma::mat omega = embed_per_user(maps, s.d);
    const ForwardOperator A(s.g.V, s.ps.P_mat);
    const MmseEstimator est(A, omega, 0.05);
    for (const auto &y : b.Y)
    {
        const arma::cx_mat g = est.estimate_G(y);
        const arma::cx_mat lhs = omega % A.adjoint(y - A.apply(g));
        CHECK(arma::norm(lhs - 0.05 * g, "fro") <= 1e-6 * arma::norm(lhs, "fro"));
    }
}

TEST_CASE("Iterative solver reports divergence")
{
    const Setup s = make_setup(2.0, 1, 6);
    Rng rng = make_rng(56);
    MmseOptions o;
    o.solver = MmseSolver::Iterative;
    o.max_iter = 1;
    const MmseEstimator cg(ForwardOperator(s.g.V, s.ps.P_mat), testutil::rand_mat(rng, s.d.N_r, s.d.stacked_cols()), 1e-3, o);
    try
    {
        cg.estimate_G(testutil::rand_cx(rng, s.d.M_r, s.d.M_p));
        FAIL("expected SolverDiverged");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::SolverDiverged);
    }
    MmseOptions big;
    big.max_dim = 10;
    CHECK_THROWS_AS(MmseEstimator(ForwardOperator(s.g.V, s.ps.P_mat), arma::ones(s.d.N_r, s.d.stacked_cols()), 1e-3, big),
                    Error);
}

TEST_CASE("MSE metric")
{
    Rng rng = make_rng(57);
    const std::size_t Mr = 16, Mp = 24;
    std::vector<std::vector<arma::cx_mat>> H(3, std::vector<arma::cx_mat>(4));
    for (auto &row : H)
        for (auto &h : row)
        {
            h = testutil::rand_cx(rng, Mr, Mp);
            h *= std::sqrt(double(Mr * Mp)) / arma::norm(h, "fro");
        }
    CHECK(mse_metric(H, H) == -300.0);

    auto Z = H;
    for (auto &row : Z)
        for (auto &h : row)
            h.zeros();
    CHECK(mse_metric(Z, H) == Catch::Approx(10.0 * std::log10(double(Mr * Mp))).epsilon(1e-12));
    CHECK(mse_metric(Z, H, DbBase::Log2) == Catch::Approx(10.0 * std::log2(double(Mr * Mp))).epsilon(1e-12));

    auto R = H;
    for (auto &row : R)
        for (auto &h : row)
            h += 0.3 * testutil::rand_cx(rng, Mr, Mp);
    double e = 0.0;
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t k = 0; k < 4; ++k)
            for (std::size_t i = 0; i < Mr; ++i)
                for (std::size_t j = 0; j < Mp; ++j)
                    e += std::norm(R[t][k](i, j) - H[t][k](i, j));
    CHECK(mse_metric(R, H) == Catch::Approx(10.0 * std::log10(e / 12.0)).epsilon(1e-12));

    CHECK(to_db(0.0) == -300.0);
    CHECK(to_db(std::numeric_limits<double>::denorm_min()) == -300.0);
    CHECK(to_db(100.0) == Catch::Approx(20.0));
}
