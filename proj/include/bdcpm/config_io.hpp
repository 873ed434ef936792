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

#ifndef BDCPM_CONFIG_IO_HPP
#define BDCPM_CONFIG_IO_HPP

#include <cstdint>
#include <string>

#include "bdcpm/sysmodel.hpp"

namespace bdcpm
{

// JSON object with exactly the SystemConfig field names. Missing keys keep their
// value from `base`; unknown keys are rejected.
SystemConfig config_from_json(const std::string &text, const SystemConfig &base = SystemConfig{});
SystemConfig load_config(const std::string &path, const SystemConfig &base = SystemConfig{});

std::string config_to_json(const SystemConfig &cfg);

// FNV-1a over the canonical JSON form, printed as 16 hex digits.
std::string config_hash(const SystemConfig &cfg);

// Git revision the library was built from, or "unknown".
const char *build_id();

} // namespace bdcpm

#endif
