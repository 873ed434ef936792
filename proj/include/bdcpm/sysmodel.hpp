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

#ifndef BDCPM_SYSMODEL_HPP
#define BDCPM_SYSMODEL_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bdcpm/error.hpp"

namespace bdcpm
{

// Scalar parameters of the uplink MIMO-OFDM pilot setup.
// Fine factors are stored as doubles so that a non-integer value coming from a
// config file can be rejected explicitly instead of being silently truncated.
struct SystemConfig
{
    long M_rz = 4;                 // vertical antennas
    long M_rx = 4;                 // horizontal antennas
    long M_c = 256;                // total subcarriers
    long M_p = 24;                 // pilot subcarriers
    long M_g = 32;                 // cyclic prefix, samples
    double delta_f = 30e3;         // subcarrier spacing, Hz
    double N_az = 2.0;             // vertical angle fine factor
    double N_ax = 2.0;             // horizontal angle fine factor
    double N_ap = 2.0;             // delay fine factor
    long Q = 1;                    // number of ZC roots
    std::vector<long> P_per_root = {6};
    double sigma_z2 = 1e-3;        // noise variance, linear
    long T = 80;                   // pilot symbols per estimate
    std::uint64_t seed = 1;

    bool operator==(const SystemConfig &) const = default;
};

struct DerivedDims
{
    std::size_t M_r = 0;
    std::size_t N_z = 0;
    std::size_t N_x = 0;
    std::size_t N_r = 0;
    std::size_t N_p = 0;
    std::size_t M_f = 0;
    std::size_t N_f = 0;
    std::size_t K = 0;
    std::size_t users_per_root_cap = 0;

    // Convenience copies of the raw sizes most consumers need alongside the derived ones.
    std::size_t M_rz = 0, M_rx = 0, M_p = 0, Q = 0;
    std::size_t fine_z = 1, fine_x = 1, fine_p = 1;
    std::vector<std::size_t> P_per_root;

    std::size_t stacked_cols() const { return Q * N_p; }

    bool operator==(const DerivedDims &) const = default;
};

// Stacked-layout helpers. User p of root q occupies columns
// [q N_p + p N_f, q N_p + (p+1) N_f) of every N_r x Q N_p stacked matrix.
std::size_t user_column(const DerivedDims &dims, std::size_t q, std::size_t p);

struct UserSlot
{
    std::size_t q = 0;
    std::size_t p = 0;
};

// Users in stacked order (root-major).
std::vector<UserSlot> user_slots(const DerivedDims &dims);

// Pure computation of the derived sizes. The config must already satisfy its invariants.
DerivedDims derive_dims(const SystemConfig &cfg);

// Checks every invariant and returns the derived sizes; throws Error otherwise.
DerivedDims validate(const SystemConfig &cfg);

// The desk-scale default used throughout the tests.
SystemConfig desk_config();

// Full-scale OFDM numerology (2048 subcarriers, 120 pilots, CP 144) with an 8x16 array.
SystemConfig table_config();

// sigma^2 = 10^(-SNR/10) with unit pilot power.
double snr_db_to_sigma2(double snr_db);

} // namespace bdcpm

#endif
