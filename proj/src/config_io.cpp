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

#include "bdcpm/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#ifndef BDCPM_BUILD_ID
#define BDCPM_BUILD_ID "unknown"
#endif

namespace bdcpm
{

using nlohmann::json;

namespace
{

template <typename T>
void read_field(const json &j, const char *key, T &dst)
{
    auto it = j.find(key);
    if (it == j.end())
        return;
    try
    {
        dst = it->get<T>();
    }
    catch (const json::exception &e)
    {
        throw Error(ErrorCode::BadConfig, std::string("field ") + key + ": " + e.what());
    }
}

json to_json_obj(const SystemConfig &c)
{
    json j;
    j["M_rz"] = c.M_rz;
    j["M_rx"] = c.M_rx;
    j["M_c"] = c.M_c;
    j["M_p"] = c.M_p;
    j["M_g"] = c.M_g;
    j["delta_f"] = c.delta_f;
    j["N_az"] = c.N_az;
    j["N_ax"] = c.N_ax;
    j["N_ap"] = c.N_ap;
    j["Q"] = c.Q;
    j["P_per_root"] = c.P_per_root;
    j["sigma_z2"] = c.sigma_z2;
    j["T"] = c.T;
    j["seed"] = c.seed;
    return j;
}

} // namespace

SystemConfig config_from_json(const std::string &text, const SystemConfig &base)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::exception &e)
    {
        throw Error(ErrorCode::BadConfig, e.what());
    }
    if (!j.is_object())
        throw Error(ErrorCode::BadConfig, "config must be a JSON object");

    static const char *known[] = {"M_rz", "M_rx", "M_c", "M_p", "M_g", "delta_f", "N_az",
                                  "N_ax", "N_ap", "Q", "P_per_root", "sigma_z2", "T", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
    {
        bool ok = false;
        for (const char *k : known)
            ok = ok || it.key() == k;
        if (!ok)
            throw Error(ErrorCode::BadConfig, "unknown field " + it.key());
    }

    SystemConfig c = base;
    read_field(j, "M_rz", c.M_rz);
    read_field(j, "M_rx", c.M_rx);
    read_field(j, "M_c", c.M_c);
    read_field(j, "M_p", c.M_p);
    read_field(j, "M_g", c.M_g);
    read_field(j, "delta_f", c.delta_f);
    read_field(j, "N_az", c.N_az);
    read_field(j, "N_ax", c.N_ax);
    read_field(j, "N_ap", c.N_ap);
    read_field(j, "Q", c.Q);
    read_field(j, "P_per_root", c.P_per_root);
    read_field(j, "sigma_z2", c.sigma_z2);
    read_field(j, "T", c.T);
    read_field(j, "seed", c.seed);

    // A lone P_per_root list implies Q when Q is not given.
    if (j.contains("P_per_root") && !j.contains("Q"))
        c.Q = static_cast<long>(c.P_per_root.size());
    return c;
}

SystemConfig load_config(const std::string &path, const SystemConfig &base)
{
    std::ifstream f(path);
    if (!f)
        throw Error(ErrorCode::Io, "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return config_from_json(ss.str(), base);
}

std::string config_to_json(const SystemConfig &cfg)
{
    return to_json_obj(cfg).dump(2);
}

std::string config_hash(const SystemConfig &cfg)
{
    const std::string s = to_json_obj(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const char *build_id()
{
    return BDCPM_BUILD_ID;
}

} // namespace bdcpm
