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

#ifndef BDCPM_HARNESS_HPP
#define BDCPM_HARNESS_HPP

#include <armadillo>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bdcpm/baseline.hpp"
#include "bdcpm/channel.hpp"
#include "bdcpm/chest.hpp"
#include "bdcpm/fastops.hpp"
#include "bdcpm/powerest.hpp"

namespace bdcpm
{

enum class EstimatorKind
{
    KlDense,
    KlFast,
    MFocuss
};

std::string to_string(EstimatorKind k);
EstimatorKind parse_estimator(const std::string &s);

// Everything that depends only on the configuration, built once and shared by all points.
struct Context
{
    SystemConfig cfg;
    DerivedDims dims;
    GridSet grids;
    PilotSet pilots;
    std::shared_ptr<const DenseSandwich> dense; // null above the dense cap
    std::shared_ptr<const FastSandwich> fast;

    const SandwichOperator &sandwich(EstimatorKind k) const;
};

Context make_context(const SystemConfig &cfg);

// One simulated operating point: true per-user maps and the received batch.
struct Point
{
    std::vector<BeamPowerMap> maps;
    arma::mat omega_stacked;
    ReceiveBatch batch;
};

// Maps come from substream (seed, 0), the batch from derive_seed(seed, 1). With
// unit_energy each map sums to 1, which makes E||H_k||^2 = M_r M_p.
Point simulate_point(const Context &ctx, const SynthParams &synth, double snr_db, std::size_t T, std::uint64_t seed,
                     bool unit_energy = false, bool store_H = false);

// 10 log10 of the user-averaged ||hat - truth||^2 / ||truth||^2. Throws ZeroTruth.
double nmse_metric(const std::vector<arma::mat> &omega_hat, const std::vector<arma::mat> &omega_true,
                   DbBase base = DbBase::Log10);
double nmse_metric(const arma::mat &stacked_hat, const std::vector<BeamPowerMap> &truth, const DerivedDims &dims,
                   DbBase base = DbBase::Log10);

enum class SweepKind
{
    Nmse,
    Mse
};

struct ExperimentSpec
{
    std::string scenario = "desk";
    SystemConfig cfg;
    std::vector<double> snr_db = {30.0};
    std::vector<long> samples = {10};
    std::vector<EstimatorKind> estimators = {EstimatorKind::KlFast};
    std::size_t repetitions = 1;
    SweepKind kind = SweepKind::Nmse;
    SynthParams synth;
    EstimatorOptions kl;
    std::size_t mf_iters = 30;
    double mf_tol = 1e-4;
    bool timing = false;
    std::size_t threads = 1;
    DbBase db = DbBase::Log10;
};

struct ResultRow
{
    std::string scenario;
    std::string estimator;
    double snr_db = 0.0;
    std::size_t T = 0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    double nmse_db = arma::datum::nan;
    double mse_db = arma::datum::nan;
    std::size_t iters = 0;
    double runtime_ms = arma::datum::nan;
    std::string error;
};

struct ResultTable
{
    std::vector<ResultRow> rows;
    std::string build_id;
    std::string config_hash;

    std::size_t failures() const;
};

// Seed of sweep point (snr index, T index, repetition); shared by all estimators at that point.
struct BatchEstimate
{
    arma::mat omega;             // stacked layout
    std::size_t iters = 0;
    std::vector<double> trace;   // objective per iteration, estimator specific
};

BatchEstimate estimate_batch(const Context &ctx, const ExperimentSpec &spec, EstimatorKind k, const ReceiveBatch &batch);

std::uint64_t point_seed(std::uint64_t seed, std::size_t snr_i, std::size_t t_i, std::size_t rep);

ResultTable run_experiment(const ExperimentSpec &spec);

std::string to_csv(const ResultTable &table);
std::string to_json(const ResultTable &table);

// One CSV per (estimator, T) curve: snr_db, mean and median of the metric over repetitions.
// Returns the written paths.
std::vector<std::string> write_plotdata(const ResultTable &table, const std::string &stem);

struct TraceRow
{
    double snr_db = 0.0;
    std::size_t T = 0;
    std::size_t iter = 0;
    double objective = 0.0;
};

std::vector<TraceRow> convergence_traces(const ExperimentSpec &spec);
std::string to_csv(const std::vector<TraceRow> &rows);

struct BenchRow
{
    std::size_t N_r = 0;
    std::size_t QN_p = 0;
    double dense_ms = 0.0;
    double fast_ms = 0.0;
    double ratio = 0.0;
    double max_rel_diff = 0.0;
};

// Four growing sizes: antenna arrays 2x2 .. 16x16 with 12 .. 96 pilots, fine factors 2.
std::vector<SystemConfig> default_bench_sizes();

// Per size: best-of-`repeats` wall time of one dense and one fast gradient evaluation.
std::vector<BenchRow> bench_fast_vs_dense(const std::vector<SystemConfig> &sizes, std::size_t repeats = 5);
std::string to_csv(const std::vector<BenchRow> &rows);

} // namespace bdcpm

#endif
