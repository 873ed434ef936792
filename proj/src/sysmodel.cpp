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

#include "bdcpm/sysmodel.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace bdcpm
{

std::string_view to_string(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::TooManyUsersPerRoot: return "TooManyUsersPerRoot";
    case ErrorCode::BadFineFactor: return "BadFineFactor";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::BlockOverflow: return "BlockOverflow";
    case ErrorCode::BadRoot: return "BadRoot";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::NonpositiveModel: return "NonpositiveModel";
    case ErrorCode::BadSize: return "BadSize";
    case ErrorCode::ScaleTooLarge: return "ScaleTooLarge";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::ZeroTruth: return "ZeroTruth";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::NumericalResidue: return "NumericalResidue";
    }
    return "Unknown";
}

DerivedDims derive_dims(const SystemConfig &cfg)
{
    DerivedDims d;
    d.M_rz = static_cast<std::size_t>(cfg.M_rz);
    d.M_rx = static_cast<std::size_t>(cfg.M_rx);
    d.M_p = static_cast<std::size_t>(cfg.M_p);
    d.Q = static_cast<std::size_t>(cfg.Q);
    d.fine_z = static_cast<std::size_t>(cfg.N_az);
    d.fine_x = static_cast<std::size_t>(cfg.N_ax);
    d.fine_p = static_cast<std::size_t>(cfg.N_ap);

    d.M_r = d.M_rz * d.M_rx;
    d.N_z = d.fine_z * d.M_rz;
    d.N_x = d.fine_x * d.M_rx;
    d.N_r = d.N_z * d.N_x;
    d.N_p = d.fine_p * d.M_p;

    // ceil(M_p * M_g / M_c) in integer arithmetic
    const auto num = static_cast<std::size_t>(cfg.M_p) * static_cast<std::size_t>(cfg.M_g);
    const auto den = static_cast<std::size_t>(cfg.M_c);
    d.M_f = (num + den - 1) / den;
    d.N_f = d.fine_p * d.M_f;
    d.users_per_root_cap = d.M_f == 0 ? 0 : d.M_p / d.M_f;

    d.P_per_root.reserve(cfg.P_per_root.size());
    for (long p : cfg.P_per_root)
        d.P_per_root.push_back(static_cast<std::size_t>(p));
    d.K = std::accumulate(d.P_per_root.begin(), d.P_per_root.end(), std::size_t{0});
    return d;
}

namespace
{

void check_fine_factor(double v, const char *name)
{
    if (!(v >= 1.0) || std::floor(v) != v)
        throw Error(ErrorCode::BadFineFactor, std::string(name) + " must be an integer >= 1");
}

void check_positive(long v, const char *name)
{
    if (v < 1)
        throw Error(ErrorCode::BadDimension, std::string(name) + " must be >= 1");
}

} // namespace

DerivedDims validate(const SystemConfig &cfg)
{
    check_positive(cfg.M_rz, "M_rz");
    check_positive(cfg.M_rx, "M_rx");
    check_positive(cfg.M_c, "M_c");
    check_positive(cfg.M_p, "M_p");
    check_positive(cfg.M_g, "M_g");
    check_positive(cfg.Q, "Q");
    check_positive(cfg.T, "T");
    check_fine_factor(cfg.N_az, "N_az");
    check_fine_factor(cfg.N_ax, "N_ax");
    check_fine_factor(cfg.N_ap, "N_ap");

    if (!(cfg.sigma_z2 >= 0.0))
        throw Error(ErrorCode::BadDimension, "sigma_z2 must be >= 0");
    if (!(cfg.delta_f > 0.0))
        throw Error(ErrorCode::BadDimension, "delta_f must be > 0");
    if (cfg.M_p > cfg.M_c)
        throw Error(ErrorCode::BadDimension, "M_p must not exceed M_c");
    if (cfg.M_g >= cfg.M_c)
        throw Error(ErrorCode::BadDimension, "M_g must be smaller than M_c");
    if (cfg.P_per_root.size() != static_cast<std::size_t>(cfg.Q))
        throw Error(ErrorCode::BadDimension, "P_per_root must have Q entries");
    for (long p : cfg.P_per_root)
        check_positive(p, "P_per_root entry");

    DerivedDims d = derive_dims(cfg);
    for (std::size_t q = 0; q < d.Q; ++q)
    {
        if (d.P_per_root[q] > d.users_per_root_cap)
            throw Error(ErrorCode::TooManyUsersPerRoot,
                        "root " + std::to_string(q) + " carries " + std::to_string(d.P_per_root[q]) +
                            " users, cap is " + std::to_string(d.users_per_root_cap));
    }
    return d;
}

std::size_t user_column(const DerivedDims &dims, std::size_t q, std::size_t p)
{
    return q * dims.N_p + p * dims.N_f;
}

std::vector<UserSlot> user_slots(const DerivedDims &dims)
{
    std::vector<UserSlot> s;
    for (std::size_t q = 0; q < dims.Q; ++q)
        for (std::size_t p = 0; p < dims.P_per_root[q]; ++p)
            s.push_back({q, p});
    return s;
}

SystemConfig desk_config()
{
    return SystemConfig{};
}

SystemConfig table_config()
{
    SystemConfig c;
    c.M_rz = 8;
    c.M_rx = 16;
    c.M_c = 2048;
    c.M_p = 120;
    c.M_g = 144;
    c.delta_f = 30e3;
    c.P_per_root = {12};
    return c;
}

double snr_db_to_sigma2(double snr_db)
{
    return std::pow(10.0, -snr_db / 10.0);
}

} // namespace bdcpm
