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

#ifndef BDCPM_POWEREST_HPP
#define BDCPM_POWEREST_HPP

#include <armadillo>
#include <cstddef>
#include <string>
#include <vector>

#include "bdcpm/channel.hpp"
#include "bdcpm/manifold.hpp"
#include "bdcpm/pilots.hpp"
#include "bdcpm/sysmodel.hpp"

namespace bdcpm
{

struct MomentObservation
{
    arma::mat phi;          // sample mean of |A^H Y_t B^H|^2
    std::size_t T_used = 0;
    arma::mat noise;        // additive noise floor, same shape as phi
};

// X -> T_left X T_right with entrywise nonnegative, symmetric T_left, T_right.
class SandwichOperator
{
public:
    virtual ~SandwichOperator() = default;
    virtual arma::mat apply(const arma::mat &X) const = 0;
    virtual std::size_t n_rows() const = 0;
    virtual std::size_t n_cols() const = 0;
};

class DenseSandwich final : public SandwichOperator
{
public:
    DenseSandwich(arma::mat T_left, arma::mat T_right);

    arma::mat apply(const arma::mat &X) const override;
    std::size_t n_rows() const override { return T_left_.n_rows; }
    std::size_t n_cols() const override { return T_right_.n_cols; }

    const arma::mat &T_left() const { return T_left_; }
    const arma::mat &T_right() const { return T_right_; }

private:
    arma::mat T_left_, T_right_;
};

// C % conj(C) as a real matrix.
arma::mat build_t_factor(const arma::cx_mat &C);

// T_a = |V^H V|^2 and T_f = |P P^H|^2, materialized densely.
DenseSandwich make_dense_sandwich(const GridSet &grids, const PilotSet &pilots);

// Receive model Y = A G B + Z with white noise of variance sigma_z2.
struct BilinearModel
{
    arma::cx_mat A;
    arma::cx_mat B;
    double sigma_z2 = 0.0;

    DenseSandwich sandwich() const;

    // N_ij = sigma_z2 ||A e_i||^2 ||e_j^T B||^2
    arma::mat noise_floor() const;

    MomentObservation observe(const std::vector<arma::cx_mat> &Y) const;
};

// Stacked uplink model: A = V, B = P. Noise floor is M_r M_p sigma_z2 everywhere.
MomentObservation accumulate_phi(const ReceiveBatch &batch, const GridSet &grids, const PilotSet &pilots);

// Sum of phi log(phi / model) + model - phi, with phi < 1e-30 taken as zero.
// Throws NonpositiveModel if any model entry is <= 0.
double kl_objective(const arma::mat &phi, const arma::mat &model);

arma::mat model_matrix(const arma::mat &M, const MomentObservation &obs, const SandwichOperator &op);
double kl_objective(const arma::mat &M, const MomentObservation &obs, const SandwichOperator &op);

// 2 (T_a (1 - phi / model) T_f) % M
arma::mat kl_gradient(const arma::mat &M, const MomentObservation &obs, const SandwichOperator &op);

enum class InitMode
{
    Matched, // omega0 = phi / mean(T_a 1 T_f)
    Literal  // omega0 = phi / numel(phi)
};

enum class StopReason
{
    StepUnderflow,
    MaxIterations
};

struct EstimatorOptions
{
    std::size_t D = 200;
    double delta0 = 0.0;        // <= 0 selects 1 / max(T_a 1 T_f)
    double delta_min_rel = 1e-12;
    double alpha = 0.5;
    double step_growth = 1.5;   // applied to the step after every accepted iteration
    InitMode init = InitMode::Matched;
};

struct EstimatorState
{
    arma::mat M;
    arma::mat omega;
    double step = 0.0;
    std::size_t iter = 0;
    std::vector<double> trace; // trace[0] is the objective at initialization
    StopReason stop = StopReason::MaxIterations;
};

EstimatorState estimate(const MomentObservation &obs, const SandwichOperator &op,
                        const EstimatorOptions &opts = EstimatorOptions{});

// Same iteration started from a caller-supplied M0 instead of the init rule.
EstimatorState estimate(const MomentObservation &obs, const SandwichOperator &op, const EstimatorOptions &opts,
                        const arma::mat &M0);

// Per-user maps from an N_r x Q N_p stacked matrix, in user_slots() order.
std::vector<BeamPowerMap> split_per_user(const arma::mat &stacked, const DerivedDims &dims);
arma::mat embed_per_user(const std::vector<arma::mat> &maps, const DerivedDims &dims);
arma::mat embed_per_user(const std::vector<BeamPowerMap> &maps, const DerivedDims &dims);

// Single-user flat-fading variant Y_m = V_r G V_t^T X_k + Z_m, solved with the same core.
BeamPowerMap estimate_flat(const std::vector<arma::cx_mat> &Y, const arma::cx_mat &V_r, const arma::cx_mat &V_t,
                           const arma::cx_mat &X_k, double sigma_z2,
                           const EstimatorOptions &opts = EstimatorOptions{});

// Noise variance from delay columns that carry no user, median of phi / (M_r M_p).
// Off by default in every pipeline; the estimator normally takes sigma_z2 as known.
double estimate_noise_from_guard(const arma::mat &phi, const DerivedDims &dims);

void write_matrix_csv(const std::string &path, const arma::mat &m);
void write_trace_csv(const std::string &path, const std::vector<double> &trace);

} // namespace bdcpm

#endif
