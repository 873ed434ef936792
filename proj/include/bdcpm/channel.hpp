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

#ifndef BDCPM_CHANNEL_HPP
#define BDCPM_CHANNEL_HPP

#include <armadillo>
#include <cstdint>
#include <vector>

#include "bdcpm/manifold.hpp"
#include "bdcpm/pilots.hpp"
#include "bdcpm/rng.hpp"
#include "bdcpm/sysmodel.hpp"

namespace bdcpm
{

// Per-user beam power map over the N_r x N_f angle-delay grid.
struct BeamPowerMap
{
    arma::mat omega;
    arma::mat m_root;

    static BeamPowerMap from_omega(const arma::mat &omega);

    // Fraction of entries above rel * max(omega).
    double support_fraction(double rel = 1e-6) const;
};

struct SynthParams
{
    std::size_t n_clusters = 2;
    double angle_spread = 0.3; // Gaussian std dev in grid bins
    double delay_spread = 0.3; // exponential decay constant in grid bins
};

// Sum of separable clusters: a Gaussian bump over the (wrapped) 2D angle grid times a
// one-sided exponential over delay starting at a uniformly drawn tap. Normalized to
// sum N_f; entries below 1e-8 of the peak are set to zero.
BeamPowerMap synth_power_map(const DerivedDims &dims, const SynthParams &params, Rng &rng);

struct ChannelRealization
{
    arma::cx_mat G; // N_r x N_f
    arma::cx_mat H; // M_r x M_p
};

ChannelRealization realize_channel(const BeamPowerMap &map, const GridSet &grids, Rng &rng);

struct ReceiveBatch
{
    std::vector<arma::cx_mat> Y;                    // T x (M_r x M_p)
    std::vector<arma::cx_mat> G_truth;              // T x (N_r x Q N_p)
    std::vector<std::vector<arma::cx_mat>> H_truth; // [t][k], empty unless requested
    double sigma_z2 = 0.0;
    std::uint64_t seed = 0;

    std::size_t T() const { return Y.size(); }
};

struct SimOptions
{
    bool store_H = false;
    bool renormalize = false; // scale every H_{k,t} to squared norm M_r M_p
    double layout_tol = 1e-9;
};

// Symbol t draws from substream (seed, t). Every symbol is formed both as the per-user
// sum of H_k X_k and as V G P; a disagreement above layout_tol raises LayoutMismatch.
ReceiveBatch simulate_rx(const std::vector<BeamPowerMap> &maps, const PilotSet &pilots, const GridSet &grids,
                         const DerivedDims &dims, std::size_t T, double sigma_z2, std::uint64_t seed,
                         const SimOptions &opts = SimOptions{});

// Per-user channels V G_k U_f^T extracted from a stacked beam-domain matrix.
std::vector<arma::cx_mat> user_channels(const arma::cx_mat &G_stacked, const GridSet &grids, const DerivedDims &dims);

} // namespace bdcpm

#endif
