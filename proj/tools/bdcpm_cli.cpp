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

// bdcpm command-line front end.
//
//   bdcpm estimate    [--batch in.bin] [--save-batch out.bin] --out omega.csv [--trace trace.csv]
//   bdcpm sweep-nmse  --snr -10,0,10 --samples 10,20 --estimator kl-fast,mfocuss --reps 5 --out rows.csv
//   bdcpm sweep-mse   ...
//   bdcpm convergence --snr -10,30 --samples 10
//   bdcpm bench       [--repeats 5]
//
// Exit status: 0 on success, 1 on a fatal error, 2 when some sweep rows failed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "bdcpm/batch_io.hpp"
#include "bdcpm/config_io.hpp"
#include "bdcpm/harness.hpp"

using namespace bdcpm;

namespace
{

struct Common
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sets;
    std::string out;
    std::vector<std::string> estimators;
    std::vector<double> snr;
    std::vector<long> samples;
    std::size_t reps = 1;
    std::size_t threads = 1;
    std::size_t iters = 0;
    std::string scenario;
    bool emit_plotdata = false;
    bool json = false;
    bool timing = false;
    bool log2_db = false;
};

void add_common(CLI::App *app, Common &c, bool sweep)
{
    app->add_option("--config", c.config_path, "JSON file with SystemConfig fields")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "Master seed (overrides the config)");
    app->add_option("--set", c.sets, "Override a config field, key=value (JSON value)")->take_all();
    app->add_option("--out", c.out, "Output path (stdout when omitted)");
    app->add_option("--estimator", c.estimators, "kl-dense, kl-fast or mfocuss")->delimiter(',');
    app->add_option("--snr", c.snr, "SNR points in dB")->delimiter(',');
    app->add_option("--samples", c.samples, "Pilot symbol counts T")->delimiter(',');
    app->add_option("--iters", c.iters, "Estimator iteration budget");
    app->add_flag("--log2-db", c.log2_db, "Report 10 log2 instead of 10 log10");
    if (sweep)
    {
        app->add_option("--reps", c.reps, "Repetitions per point")->check(CLI::PositiveNumber);
        app->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
        app->add_option("--scenario", c.scenario, "Scenario label written to every row");
        app->add_flag("--emit-plotdata", c.emit_plotdata, "Write per-curve CSV next to --out");
        app->add_flag("--json", c.json, "Write JSON instead of CSV");
        app->add_flag("--timing", c.timing, "Record runtime_ms per row");
    }
}

SystemConfig resolve_config(const Common &c)
{
    SystemConfig cfg = c.config_path.empty() ? desk_config() : load_config(c.config_path, desk_config());
    if (!c.sets.empty())
    {
        nlohmann::json patch = nlohmann::json::object();
        for (const auto &kv : c.sets)
        {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0)
                throw Error(ErrorCode::BadConfig, "--set expects key=value, got '" + kv + "'");
            const std::string val = kv.substr(eq + 1);
            try
            {
                patch[kv.substr(0, eq)] = nlohmann::json::parse(val);
            }
            catch (const nlohmann::json::parse_error &)
            {
                patch[kv.substr(0, eq)] = val;
            }
        }
        cfg = config_from_json(patch.dump(), cfg);
    }
    if (c.seed)
        cfg.seed = *c.seed;
    validate(cfg);
    return cfg;
}

ExperimentSpec make_spec(const Common &c, SweepKind kind)
{
    ExperimentSpec spec;
    spec.cfg = resolve_config(c);
    spec.kind = kind;
    spec.scenario = c.scenario.empty() ? "desk" : c.scenario;
    if (!c.snr.empty())
        spec.snr_db = c.snr;
    spec.samples = c.samples.empty() ? std::vector<long>{long(spec.cfg.T)} : c.samples;
    if (!c.estimators.empty())
    {
        spec.estimators.clear();
        for (const auto &e : c.estimators)
            spec.estimators.push_back(parse_estimator(e));
    }
    spec.repetitions = c.reps;
    spec.threads = c.threads;
    spec.timing = c.timing;
    spec.db = c.log2_db ? DbBase::Log2 : DbBase::Log10;
    if (c.iters)
    {
        spec.kl.D = c.iters;
        spec.mf_iters = c.iters;
    }
    return spec;
}

void emit(const std::string &path, const std::string &text)
{
    if (path.empty())
    {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorCode::Io, "cannot write " + path);
    f << text;
}

std::string plot_stem(const std::string &out)
{
    if (out.empty())
        return "plotdata";
    const auto dot = out.find_last_of('.');
    const auto slash = out.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        return out.substr(0, dot);
    return out;
}

int run_sweep(const Common &c, SweepKind kind)
{
    const ExperimentSpec spec = make_spec(c, kind);
    const ResultTable table = run_experiment(spec);
    emit(c.out, c.json ? to_json(table) : to_csv(table));
    if (c.emit_plotdata)
        for (const auto &p : write_plotdata(table, plot_stem(c.out)))
            std::cerr << "wrote " << p << '\n';
    if (const std::size_t n = table.failures())
    {
        std::cerr << n << " of " << table.rows.size() << " rows failed\n";
        return 2;
    }
    return 0;
}

int run_estimate(const Common &c, const std::string &batch_in, const std::string &batch_out, const std::string &trace_out)
{
    const ExperimentSpec spec = make_spec(c, SweepKind::Nmse);
    if (spec.estimators.size() != 1)
        throw Error(ErrorCode::BadConfig, "estimate takes exactly one --estimator");
    const Context ctx = make_context(spec.cfg);

    std::optional<Point> pt;
    ReceiveBatch batch;
    if (!batch_in.empty())
        batch = read_batch(batch_in);
    else
    {
        pt = simulate_point(ctx, spec.synth, spec.snr_db.front(), std::size_t(spec.samples.front()), spec.cfg.seed);
        batch = pt->batch;
    }
    if (!batch_out.empty())
        write_batch(batch_out, batch);

    const BatchEstimate est = estimate_batch(ctx, spec, spec.estimators.front(), batch);
    if (c.out.empty())
        std::cout << arma::mat(est.omega);
    else
        write_matrix_csv(c.out, est.omega);
    if (!trace_out.empty())
        write_trace_csv(trace_out, est.trace);

    std::cerr << to_string(spec.estimators.front()) << ": " << est.iters << " iterations";
    if (pt)
        std::cerr << ", nmse " << nmse_metric(est.omega, pt->maps, ctx.dims, spec.db) << " dB";
    std::cerr << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Beam-domain channel power estimation experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(build_id()));

    Common est_c, nmse_c, mse_c, conv_c, bench_c;
    std::string batch_in, batch_out, trace_out;
    std::size_t repeats = 5;

    auto *est = app.add_subcommand("estimate", "Estimate a power map from one batch");
    add_common(est, est_c, false);
    est->add_option("--batch", batch_in, "Read the batch from this file instead of simulating")->check(CLI::ExistingFile);
    est->add_option("--save-batch", batch_out, "Write the batch that was used");
    est->add_option("--trace", trace_out, "Write the objective trace as CSV");

    auto *nmse = app.add_subcommand("sweep-nmse", "NMSE of the power map over SNR and T");
    add_common(nmse, nmse_c, true);
    auto *mse = app.add_subcommand("sweep-mse", "MMSE channel estimation error over SNR and T");
    add_common(mse, mse_c, true);

    auto *conv = app.add_subcommand("convergence", "Objective traces of the KL estimator");
    add_common(conv, conv_c, false);

    auto *bench = app.add_subcommand("bench", "Dense versus fast gradient timing");
    bench->add_option("--out", bench_c.out, "Output path (stdout when omitted)");
    bench->add_option("--repeats", repeats, "Timing repeats per size (best is kept)")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*est)
            return run_estimate(est_c, batch_in, batch_out, trace_out);
        if (*nmse)
            return run_sweep(nmse_c, SweepKind::Nmse);
        if (*mse)
            return run_sweep(mse_c, SweepKind::Mse);
        if (*conv)
        {
            ExperimentSpec spec = make_spec(conv_c, SweepKind::Nmse);
            if (conv_c.snr.empty())
                spec.snr_db = {-10.0, 30.0};
            emit(conv_c.out, to_csv(convergence_traces(spec)));
            return 0;
        }
        if (*bench)
        {
            emit(bench_c.out, to_csv(bench_fast_vs_dense(default_bench_sizes(), repeats)));
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "bdcpm: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
