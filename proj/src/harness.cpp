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

#include "bdcpm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "bdcpm/config_io.hpp"
#include "bdcpm/forward_op.hpp"

namespace bdcpm
{

std::string to_string(EstimatorKind k)
{
    switch (k)
    {
    case EstimatorKind::KlDense: return "kl-dense";
    case EstimatorKind::KlFast: return "kl-fast";
    case EstimatorKind::MFocuss: return "mfocuss";
    }
    return "unknown";
}

EstimatorKind parse_estimator(const std::string &s)
{
    if (s == "kl-dense")
        return EstimatorKind::KlDense;
    if (s == "kl-fast")
        return EstimatorKind::KlFast;
    if (s == "mfocuss")
        return EstimatorKind::MFocuss;
    throw Error(ErrorCode::BadConfig, "unknown estimator " + s);
}

const SandwichOperator &Context::sandwich(EstimatorKind k) const
{
    if (k == EstimatorKind::KlDense)
    {
        if (!dense)
            throw Error(ErrorCode::ScaleTooLarge, "dense operators are not available at this size");
        return *dense;
    }
    return *fast;
}

Context make_context(const SystemConfig &cfg)
{
    Context c;
    c.cfg = cfg;
    c.dims = validate(cfg);
    c.grids = build_grids(cfg, c.dims);
    c.pilots = build_pilot_matrix(cfg, c.dims, c.grids);
    c.fast = std::make_shared<FastSandwich>(build_factors(c.grids, c.pilots, c.dims));
    try
    {
        c.dense = std::make_shared<DenseSandwich>(make_dense_sandwich(c.grids, c.pilots));
    }
    catch (const Error &e)
    {
        if (e.code() != ErrorCode::ScaleTooLarge)
            throw;
    }
    return c;
}

Point simulate_point(const Context &ctx, const SynthParams &synth, double snr_db, std::size_t T, std::uint64_t seed,
                     bool unit_energy, bool store_H)
{
    Point pt;
    Rng rng = make_rng(seed, 0);
    const auto K = user_slots(ctx.dims).size();
    for (std::size_t k = 0; k < K; ++k)
    {
        BeamPowerMap m = synth_power_map(ctx.dims, synth, rng);
        if (unit_energy)
            m = BeamPowerMap::from_omega(m.omega / double(ctx.dims.N_f));
        pt.maps.push_back(std::move(m));
    }
    pt.omega_stacked = embed_per_user(pt.maps, ctx.dims);
    SimOptions so;
    so.store_H = store_H;
    pt.batch = simulate_rx(pt.maps, ctx.pilots, ctx.grids, ctx.dims, T, snr_db_to_sigma2(snr_db), derive_seed(seed, 1), so);
    return pt;
}

double nmse_metric(const std::vector<arma::mat> &omega_hat, const std::vector<arma::mat> &omega_true, DbBase base)
{
    if (omega_hat.size() != omega_true.size() || omega_true.empty())
        throw Error(ErrorCode::BadDimension, "user counts differ");
    double acc = 0.0;
    for (std::size_t k = 0; k < omega_true.size(); ++k)
    {
        if (omega_hat[k].n_rows != omega_true[k].n_rows || omega_hat[k].n_cols != omega_true[k].n_cols)
            throw Error(ErrorCode::BadDimension, "map shapes differ");
        const double den = arma::accu(arma::square(omega_true[k]));
        if (!(den > 0.0))
            throw Error(ErrorCode::ZeroTruth, "user " + std::to_string(k) + " has an all-zero map");
        acc += arma::accu(arma::square(omega_hat[k] - omega_true[k])) / den;
    }
    return to_db(acc / double(omega_true.size()), base);
}

double nmse_metric(const arma::mat &stacked_hat, const std::vector<BeamPowerMap> &truth, const DerivedDims &dims, DbBase base)
{
    const auto hat = split_per_user(stacked_hat, dims);
    std::vector<arma::mat> a, b;
    for (std::size_t k = 0; k < truth.size(); ++k)
    {
        a.push_back(hat.at(k).omega);
        b.push_back(truth[k].omega);
    }
    return nmse_metric(a, b, base);
}

BatchEstimate estimate_batch(const Context &ctx, const ExperimentSpec &spec, EstimatorKind k, const ReceiveBatch &batch)
{
    if (k == EstimatorKind::MFocuss)
    {
        MmvProblem pb{ForwardOperator(ctx.grids.V, ctx.pilots.P_mat), batch.Y};
        pb.sigma_z2 = batch.sigma_z2;
        MfocussResult r = mfocuss(pb, spec.mf_iters, spec.mf_tol);
        return {std::move(r.omega_hat), r.iters, std::move(r.trace)};
    }
    const MomentObservation obs = accumulate_phi(batch, ctx.grids, ctx.pilots);
    EstimatorState st = estimate(obs, ctx.sandwich(k), spec.kl);
    return {std::move(st.omega), st.iter, std::move(st.trace)};
}

std::size_t ResultTable::failures() const
{
    return std::size_t(std::count_if(rows.begin(), rows.end(), [](const ResultRow &r) { return !r.error.empty(); }));
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t snr_i, std::size_t t_i, std::size_t rep)
{
    return derive_seed(derive_seed(derive_seed(seed, snr_i), t_i), rep);
}

namespace
{

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double mse_with_prior(const Context &ctx, const arma::mat &omega, const Point &pt, DbBase base)
{
    const MmseEstimator est(ForwardOperator(ctx.grids.V, ctx.pilots.P_mat), omega, pt.batch.sigma_z2);
    std::vector<std::vector<arma::cx_mat>> hat, truth;
    for (std::size_t t = 0; t < pt.batch.T(); ++t)
    {
        hat.push_back(user_channels(est.estimate_G(pt.batch.Y[t]), ctx.grids, ctx.dims));
        truth.push_back(pt.batch.H_truth[t]);
    }
    return mse_metric(hat, truth, base);
}

std::vector<ResultRow> run_point(const Context &ctx, const ExperimentSpec &spec, std::size_t si, std::size_t ti, std::size_t rep)
{
    const double snr = spec.snr_db[si];
    const auto T = std::size_t(spec.samples[ti]);
    const std::uint64_t seed = point_seed(spec.cfg.seed, si, ti, rep);
    const bool mse = spec.kind == SweepKind::Mse;

    auto base_row = [&](const std::string &name) {
        ResultRow r;
        r.scenario = spec.scenario;
        r.estimator = name;
        r.snr_db = snr;
        r.T = T;
        r.rep = rep;
        r.seed = seed;
        return r;
    };

    std::vector<ResultRow> rows;
    Point pt;
    try
    {
        pt = simulate_point(ctx, spec.synth, snr, T, seed, mse, mse);
    }
    catch (const std::exception &e)
    {
        for (auto k : spec.estimators)
        {
            rows.push_back(base_row(to_string(k)));
            rows.back().error = e.what();
        }
        return rows;
    }

    for (auto k : spec.estimators)
    {
        ResultRow r = base_row(to_string(k));
        try
        {
            const auto t0 = Clock::now();
            const BatchEstimate out = estimate_batch(ctx, spec, k, pt.batch);
            r.iters = out.iters;
            r.nmse_db = nmse_metric(out.omega, pt.maps, ctx.dims, spec.db);
            if (mse)
                r.mse_db = mse_with_prior(ctx, out.omega, pt, spec.db);
            if (spec.timing)
                r.runtime_ms = ms_since(t0);
        }
        catch (const std::exception &e)
        {
            r.error = e.what();
        }
        rows.push_back(std::move(r));
    }

    if (mse)
    {
        const std::pair<const char *, arma::mat> refs[] = {
            {"ones", arma::mat(pt.omega_stacked.n_rows, pt.omega_stacked.n_cols, arma::fill::ones)},
            {"true", pt.omega_stacked}};
        for (const auto &[name, omega] : refs)
        {
            ResultRow r = base_row(name);
            try
            {
                const auto t0 = Clock::now();
                r.mse_db = mse_with_prior(ctx, omega, pt, spec.db);
                if (spec.timing)
                    r.runtime_ms = ms_since(t0);
            }
            catch (const std::exception &e)
            {
                r.error = e.what();
            }
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

std::string fmt(double v)
{
    if (std::isnan(v))
        return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string o = "\"";
    for (char c : s)
    {
        if (c == '"')
            o += '"';
        o += c == '\n' ? ' ' : c;
    }
    return o + "\"";
}

} // namespace

ResultTable run_experiment(const ExperimentSpec &spec)
{
    if (spec.snr_db.empty() || spec.samples.empty() || spec.repetitions < 1 || spec.estimators.empty())
        throw Error(ErrorCode::BadConfig, "experiment needs SNR points, sample counts, estimators and repetitions >= 1");
    for (long T : spec.samples)
        if (T < 1)
            throw Error(ErrorCode::BadConfig, "sample counts must be >= 1");

    const Context ctx = make_context(spec.cfg);

    struct Task
    {
        std::size_t si, ti, rep;
    };
    std::vector<Task> tasks;
    for (std::size_t si = 0; si < spec.snr_db.size(); ++si)
        for (std::size_t ti = 0; ti < spec.samples.size(); ++ti)
            for (std::size_t rep = 0; rep < spec.repetitions; ++rep)
                tasks.push_back({si, ti, rep});

    std::vector<std::vector<ResultRow>> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++)
            slots[i] = run_point(ctx, spec, tasks[i].si, tasks[i].ti, tasks[i].rep);
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(spec.threads, tasks.size()));
    if (n_threads == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
        for (auto &t : pool)
            t.join();
    }

    ResultTable table;
    table.build_id = build_id();
    table.config_hash = config_hash(spec.cfg);
    for (auto &s : slots)
        for (auto &r : s)
            table.rows.push_back(std::move(r));
    return table;
}

std::string to_csv(const ResultTable &table)
{
    std::ostringstream o;
    o << "scenario,estimator,snr_db,T,rep,seed,nmse_db,mse_db,iters,runtime_ms,build_id,config_hash,error\n";
    for (const auto &r : table.rows)
        o << csv_escape(r.scenario) << ',' << r.estimator << ',' << fmt(r.snr_db) << ',' << r.T << ',' << r.rep << ','
          << r.seed << ',' << fmt(r.nmse_db) << ',' << fmt(r.mse_db) << ',' << r.iters << ',' << fmt(r.runtime_ms) << ','
          << table.build_id << ',' << table.config_hash << ',' << csv_escape(r.error) << '\n';
    return o.str();
}

std::string to_json(const ResultTable &table)
{
    using nlohmann::json;
    auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    json j;
    j["build_id"] = table.build_id;
    j["config_hash"] = table.config_hash;
    j["rows"] = json::array();
    for (const auto &r : table.rows)
        j["rows"].push_back({{"scenario", r.scenario},
                             {"estimator", r.estimator},
                             {"snr_db", r.snr_db},
                             {"T", r.T},
                             {"rep", r.rep},
                             {"seed", r.seed},
                             {"nmse_db", num(r.nmse_db)},
                             {"mse_db", num(r.mse_db)},
                             {"iters", r.iters},
                             {"runtime_ms", num(r.runtime_ms)},
                             {"error", r.error}});
    return j.dump(2) + "\n";
}

std::vector<std::string> write_plotdata(const ResultTable &table, const std::string &stem)
{
    // (estimator, T) -> snr -> metric values, in first-seen order
    std::vector<std::pair<std::string, std::size_t>> order;
    std::map<std::pair<std::string, std::size_t>, std::map<double, std::vector<double>>> curves;
    for (const auto &r : table.rows)
    {
        const double v = std::isnan(r.mse_db) ? r.nmse_db : r.mse_db;
        if (!r.error.empty() || std::isnan(v))
            continue;
        const auto key = std::make_pair(r.estimator, r.T);
        if (!curves.count(key))
            order.push_back(key);
        curves[key][r.snr_db].push_back(v);
    }

    std::vector<std::string> paths;
    for (const auto &key : order)
    {
        const std::string path = stem + "_" + key.first + "_T" + std::to_string(key.second) + ".csv";
        std::ofstream f(path);
        if (!f)
            throw Error(ErrorCode::Io, "cannot write " + path);
        f << "snr_db,mean_db,median_db,count\n";
        for (auto &[snr, vals] : curves[key])
        {
            arma::vec v(vals);
            f << fmt(snr) << ',' << fmt(arma::mean(v)) << ',' << fmt(arma::median(v)) << ',' << v.n_elem << '\n';
        }
        paths.push_back(path);
    }
    return paths;
}

std::vector<TraceRow> convergence_traces(const ExperimentSpec &spec)
{
    const Context ctx = make_context(spec.cfg);
    const EstimatorKind k = spec.estimators.empty() ? EstimatorKind::KlFast : spec.estimators.front();
    if (k == EstimatorKind::MFocuss)
        throw Error(ErrorCode::BadConfig, "convergence traces are defined for the KL estimators only");

    std::vector<TraceRow> rows;
    for (std::size_t si = 0; si < spec.snr_db.size(); ++si)
        for (std::size_t ti = 0; ti < spec.samples.size(); ++ti)
        {
            const auto T = std::size_t(spec.samples[ti]);
            const Point pt = simulate_point(ctx, spec.synth, spec.snr_db[si], T, point_seed(spec.cfg.seed, si, ti, 0));
            const EstimatorState st = estimate(accumulate_phi(pt.batch, ctx.grids, ctx.pilots), ctx.sandwich(k), spec.kl);
            for (std::size_t i = 0; i < st.trace.size(); ++i)
                rows.push_back({spec.snr_db[si], T, i, st.trace[i]});
        }
    return rows;
}

std::string to_csv(const std::vector<TraceRow> &rows)
{
    std::ostringstream o;
    o << "snr_db,T,iter,objective\n";
    for (const auto &r : rows)
        o << fmt(r.snr_db) << ',' << r.T << ',' << r.iter << ',' << fmt(r.objective) << '\n';
    return o.str();
}

std::vector<SystemConfig> default_bench_sizes()
{
    std::vector<SystemConfig> v;
    const long arr[] = {2, 4, 8, 16};
    const long pil[] = {12, 24, 48, 96};
    for (int i = 0; i < 4; ++i)
    {
        SystemConfig c;
        c.M_rz = c.M_rx = arr[i];
        c.M_p = pil[i];
        c.M_c = 256 * (pil[i] / 12);
        c.M_g = 32;
        c.P_per_root = {1};
        v.push_back(c);
    }
    return v;
}

std::vector<BenchRow> bench_fast_vs_dense(const std::vector<SystemConfig> &sizes, std::size_t repeats)
{
    std::vector<BenchRow> out;
    for (const auto &cfg : sizes)
    {
        const Context ctx = make_context(cfg);
        if (!ctx.dense)
            throw Error(ErrorCode::ScaleTooLarge, "benchmark size exceeds the dense cap");

        const std::size_t R = ctx.dims.N_r, C = ctx.dims.stacked_cols();
        Rng rng = make_rng(cfg.seed, 77);
        std::uniform_real_distribution<double> u(0.5, 1.5);
        MomentObservation obs;
        obs.phi.set_size(R, C);
        obs.phi.imbue([&] { return u(rng); });
        obs.noise.ones(R, C);
        arma::mat M(R, C);
        M.imbue([&] { return u(rng); });

        arma::mat gd, gf;
        double td = 1e300, tf = 1e300;
        for (std::size_t i = 0; i < std::max<std::size_t>(1, repeats); ++i)
        {
            auto t0 = Clock::now();
            gd = kl_gradient(M, obs, *ctx.dense);
            td = std::min(td, ms_since(t0));
            t0 = Clock::now();
            gf = kl_gradient(M, obs, *ctx.fast);
            tf = std::min(tf, ms_since(t0));
        }
        BenchRow b;
        b.N_r = R;
        b.QN_p = C;
        b.dense_ms = td;
        b.fast_ms = tf;
        b.ratio = td / tf;
        b.max_rel_diff = arma::abs(gd - gf).max() / std::max(arma::abs(gd).max(), 1e-300);
        out.push_back(b);
    }
    return out;
}

std::string to_csv(const std::vector<BenchRow> &rows)
{
    std::ostringstream o;
    o << "N_r,QN_p,dense_ms,fast_ms,ratio,max_rel_diff\n";
    for (const auto &r : rows)
        o << r.N_r << ',' << r.QN_p << ',' << fmt(r.dense_ms) << ',' << fmt(r.fast_ms) << ',' << fmt(r.ratio) << ','
          << fmt(r.max_rel_diff) << '\n';
    return o.str();
}

} // namespace bdcpm
