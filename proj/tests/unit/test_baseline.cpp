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

#include "bdcpm/baseline.hpp"
#include "bdcpm/channel.hpp"
#include "testutil.hpp"

using namespace bdcpm;

namespace
{

struct Small
{
    SystemConfig cfg;
    DerivedDims d;
    GridSet g;
    PilotSet ps;
};

Small make_small(double fine, long P)
{
    Small s;
    s.cfg = desk_config();
    s.cfg.M_rz = s.cfg.M_rx = 2;
    s.cfg.M_p = 12;
    s.cfg.M_c = 128;
    s.cfg.N_az = s.cfg.N_ax = s.cfg.N_ap = fine;
    s.cfg.P_per_root = {P};
    s.d = validate(s.cfg);
    s.g = build_grids(s.cfg, s.d);
    s.ps = build_pilot_matrix(s.cfg, s.d, s.g);
    return s;
}

} // namespace

TEST_CASE("Noiseless single active row is recovered")
{
    const Small s = make_small(2.0, 2);
    const ForwardOperator A(s.g.V, s.ps.P_mat);
    Rng rng = make_rng(41);
    const std::size_t i = 5, j = 3;
    std::vector<arma::cx_mat> G(6), Y;
    for (auto &g : G)
    {
        g.zeros(A.g_rows(), A.g_cols());
        g(i, j) = cgauss(rng);
        Y.push_back(A.apply(g));
    }
    MmvProblem pb{A, Y};
    pb.regularized = false;
    const MfocussResult r = mfocuss(pb, 60, 1e-12);
    double res = 0.0, ref = 0.0;
    for (std::size_t t = 0; t < G.size(); ++t)
    {
        res += std::pow(arma::norm(A.apply(r.G_est[t]) - Y[t], "fro"), 2);
        ref += std::pow(arma::norm(Y[t], "fro"), 2);
    }
    CHECK(std::sqrt(res / ref) <= 1e-8);
    double err = 0.0, gn = 0.0;
    for (std::size_t t = 0; t < G.size(); ++t)
    {
        err += std::pow(arma::norm(r.G_est[t] - G[t], "fro"), 2);
        gn += std::pow(arma::norm(G[t], "fro"), 2);
    }
    CHECK(std::sqrt(err / gn) <= 1e-6);
}

TEST_CASE("Zero observations give a zero solution")
{
    const Small s = make_small(2.0, 2);
    const ForwardOperator A(s.g.V, s.ps.P_mat);
    MmvProblem pb{A, std::vector<arma::cx_mat>(4, arma::cx_mat(A.y_rows(), A.y_cols(), arma::fill::zeros))};
    pb.sigma_z2 = 1e-2;
    const MfocussResult r = mfocuss(pb);
    CHECK(arma::accu(r.omega_hat) == 0.0);
    for (const auto &g : r.G_est)
        CHECK(arma::abs(g).max() == 0.0);
}

TEST_CASE("Objective trace does not increase and omega_hat is nonnegative")
{
    Rng rng = make_rng(42);
    for (int trial = 0; trial < 4; ++trial)
    {
        const Small s = make_small(2.0, 2);
        std::vector<BeamPowerMap> maps;
        for (std::size_t k = 0; k < s.d.K; ++k)
            maps.push_back(synth_power_map(s.d, SynthParams{}, rng));
        const double s2 = trial % 2 ? 1.0 : 1e-3;
        const auto b = simulate_rx(maps, s.ps, s.g, s.d, 10, s2, 100 + std::uint64_t(trial));
        MmvProblem pb{ForwardOperator(s.g.V, s.ps.P_mat), b.Y};
        pb.sigma_z2 = s2;
        const MfocussResult r = mfocuss(pb, 30, 0.0);
        CHECK(r.iters == 30);
        for (std::size_t k = 1; k < r.trace.size(); ++k)
            CHECK(r.trace[k] <= r.trace[k - 1] * (1.0 + 1e-9));
        CHECK(r.omega_hat.min() >= 0.0);
    }
}

TEST_CASE("Dense solve cap")
{
    const Small s = make_small(2.0, 2);
    MmvProblem pb{ForwardOperator(s.g.V, s.ps.P_mat), {}};
    pb.max_dim = 10;
    try
    {
        mfocuss(pb);
        FAIL("expected ScaleTooLarge");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::ScaleTooLarge);
    }
}
