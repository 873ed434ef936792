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
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bdcpm/config_io.hpp"
#include "bdcpm/harness.hpp"
#include "testutil.hpp"

using namespace bdcpm;

namespace
{

SystemConfig small_cfg()
{
    SystemConfig c = desk_config();
    c.M_rz = c.M_rx = 2;
    c.M_p = 12;
    c.M_c = 128;
    c.P_per_root = {3};
    return c;
}

std::string slurp(const std::string &path)
{
    std::ifstream f(path);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("Estimator names round trip")
{
    for (auto k : {EstimatorKind::KlDense, EstimatorKind::KlFast, EstimatorKind::MFocuss})
        CHECK(parse_estimator(to_string(k)) == k);
    CHECK(to_string(EstimatorKind::KlFast) == "kl-fast");
    CHECK_THROWS_AS(parse_estimator("focuss"), Error);
}

TEST_CASE("NMSE metric")
{
    Rng rng = make_rng(61);
    std::vector<arma::mat> truth;
    for (int k = 0; k < 3; ++k)
        truth.push_back(testutil::rand_mat(rng, 6, 5));
    CHECK(nmse_metric(truth, truth) == -300.0);

    const std::vector<arma::mat> zero(3, arma::mat(6, 5, arma::fill::zeros));
    CHECK(nmse_metric(zero, truth) == Catch::Approx(0.0).margin(1e-12));

    std::vector<arma::mat> hat;
    for (int k = 0; k < 3; ++k)
        hat.push_back(testutil::rand_mat(rng, 6, 5));
    double acc = 0.0;
    for (int k = 0; k < 3; ++k)
    {
        double num = 0.0, den = 0.0;
        for (arma::uword i = 0; i < 6; ++i)
            for (arma::uword j = 0; j < 5; ++j)
            {
                num += std::pow(hat[k](i, j) - truth[k](i, j), 2);
                den += std::pow(truth[k](i, j), 2);
            }
        acc += num / den;
    }
    CHECK(nmse_metric(hat, truth) == Catch::Approx(10.0 * std::log10(acc / 3.0)).epsilon(1e-12));
    CHECK(nmse_metric(hat, truth, DbBase::Log2) == Catch::Approx(10.0 * std::log2(acc / 3.0)).epsilon(1e-12));

    try
    {
        nmse_metric(hat, zero);
        FAIL("expected ZeroTruth");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::ZeroTruth);
    }
}

TEST_CASE("Simulated points are reproducible and normalized")
{
    const Context ctx = make_context(small_cfg());
    const Point a = simulate_point(ctx, SynthParams{}, 10.0, 4, 77);
    const Point b = simulate_point(ctx, SynthParams{}, 10.0, 4, 77);
    for (std::size_t t = 0; t < 4; ++t)
        CHECK(arma::approx_equal(a.batch.Y[t], b.batch.Y[t], "absdiff", 0.0));
    for (const auto &m : a.maps)
        CHECK(arma::accu(m.omega) == Catch::Approx(double(ctx.dims.N_f)).epsilon(1e-12));
    CHECK(a.batch.sigma_z2 == Catch::Approx(snr_db_to_sigma2(10.0)));

    const Point u = simulate_point(ctx, SynthParams{}, 10.0, 4, 77, true, true);
    for (const auto &m : u.maps)
        CHECK(arma::accu(m.omega) == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(u.batch.H_truth.size() == 4);
    CHECK(u.batch.H_truth[0].size() == ctx.dims.K);
}

TEST_CASE("Experiments are deterministic across repetitions and thread counts")
{
    ExperimentSpec spec;
    spec.cfg = small_cfg();
    spec.snr_db = {0.0, 20.0};
    spec.samples = {5, 10};
    spec.repetitions = 2;
    spec.estimators = {EstimatorKind::KlDense, EstimatorKind::KlFast, EstimatorKind::MFocuss};
    spec.kl.D = 20;
    spec.mf_iters = 5;

    const ResultTable a = run_experiment(spec);
    spec.threads = 3;
    const ResultTable b = run_experiment(spec);
    CHECK(a.rows.size() == 2 * 2 * 2 * 3);
    CHECK(a.failures() == 0);
    CHECK(to_csv(a) == to_csv(b));

    // Every estimator at a point sees the same seed; points differ.
    CHECK(a.rows[0].seed == a.rows[1].seed);
    CHECK(a.rows[1].seed == a.rows[2].seed);
    CHECK(a.rows[0].seed != a.rows[3].seed);
    CHECK(a.rows[0].seed == point_seed(spec.cfg.seed, 0, 0, 0));
    CHECK(std::isnan(a.rows[0].runtime_ms));
    CHECK(std::isnan(a.rows[0].mse_db));

    // Dense and fast kernels fit the same model.
    for (std::size_t i = 0; i < a.rows.size(); i += 3)
        CHECK(a.rows[i].nmse_db == Catch::Approx(a.rows[i + 1].nmse_db).margin(1e-6));

    const std::string csv = to_csv(a);
    CHECK(csv.rfind("scenario,estimator,snr_db,T,rep,seed,nmse_db,mse_db,iters,runtime_ms,build_id,config_hash,error\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == long(a.rows.size() + 1));
    CHECK(to_json(a).find("\"config_hash\": \"" + config_hash(spec.cfg) + "\"") != std::string::npos);
}

TEST_CASE("MSE sweeps add reference priors")
{
    ExperimentSpec spec;
    spec.cfg = small_cfg();
    spec.kind = SweepKind::Mse;
    spec.snr_db = {10.0};
    spec.samples = {4};
    spec.kl.D = 10;
    spec.timing = true;
    const ResultTable t = run_experiment(spec);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[1].estimator == "ones");
    CHECK(t.rows[2].estimator == "true");
    for (const auto &r : t.rows)
    {
        CHECK(r.error.empty());
        CHECK(std::isfinite(r.mse_db));
        CHECK(r.runtime_ms >= 0.0);
    }
    CHECK(std::isnan(t.rows[1].nmse_db));
}

TEST_CASE("Failures are recorded per row")
{
    ExperimentSpec spec;
    spec.cfg = small_cfg();
    spec.snr_db = {10.0};
    spec.samples = {4};
    spec.estimators = {EstimatorKind::KlFast, EstimatorKind::MFocuss};
    spec.synth.n_clusters = 0;
    const ResultTable t = run_experiment(spec);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.failures() == 2);
    CHECK(to_csv(t).find("need at least one cluster") != std::string::npos);

    spec.samples = {0};
    CHECK_THROWS_AS(run_experiment(spec), Error);
}

TEST_CASE("Plot data aggregates by estimator and sample count")
{
    ResultTable t;
    auto row = [](std::string est, double snr, std::size_t T, double v) {
        ResultRow r;
        r.estimator = std::move(est);
        r.snr_db = snr;
        r.T = T;
        r.nmse_db = v;
        return r;
    };
    t.rows = {row("kl-fast", 0.0, 10, -1.0), row("kl-fast", 0.0, 10, -3.0), row("kl-fast", 0.0, 10, -8.0),
              row("kl-fast", 10.0, 10, -4.0), row("mfocuss", 0.0, 10, 2.0)};
    ResultRow bad = row("mfocuss", 10.0, 10, 0.0);
    bad.error = "boom";
    t.rows.push_back(bad);

    const auto paths = write_plotdata(t, "test_harness_plot");
    REQUIRE(paths.size() == 2);
    CHECK(paths[0] == "test_harness_plot_kl-fast_T10.csv");
    CHECK(slurp(paths[0]) == "snr_db,mean_db,median_db,count\n0,-4,-3,3\n10,-4,-4,1\n");
    CHECK(slurp(paths[1]) == "snr_db,mean_db,median_db,count\n0,2,2,1\n");
    for (const auto &p : paths)
        std::remove(p.c_str());
}

TEST_CASE("Convergence traces do not increase")
{
    ExperimentSpec spec;
    spec.cfg = small_cfg();
    spec.snr_db = {-10.0, 30.0};
    spec.samples = {10};
    spec.kl.D = 15;
    const auto rows = convergence_traces(spec);
    REQUIRE(!rows.empty());
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].snr_db == rows[i - 1].snr_db)
        {
            CHECK(rows[i].iter == rows[i - 1].iter + 1);
            CHECK(rows[i].objective <= rows[i - 1].objective);
        }
    CHECK(to_csv(rows).rfind("snr_db,T,iter,objective\n", 0) == 0);
}

TEST_CASE("Benchmark rows")
{
    std::vector<SystemConfig> sizes = {small_cfg()};
    const auto rows = bench_fast_vs_dense(sizes, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].N_r == 16);
    CHECK(rows[0].dense_ms > 0.0);
    CHECK(rows[0].fast_ms > 0.0);
    CHECK(rows[0].max_rel_diff <= 1e-9);
    const auto d = default_bench_sizes();
    CHECK(d.size() == 4);
    for (const auto &c : d)
        CHECK_NOTHROW(validate(c));
}
