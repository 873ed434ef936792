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

#ifndef BDCPM_BATCH_IO_HPP
#define BDCPM_BATCH_IO_HPP

#include <string>

#include "bdcpm/channel.hpp"

namespace bdcpm
{

// Flat little-endian binary layout:
//   char[8]   magic "BDCPMRX1"
//   uint64    M_r, M_p, N_r, QN_p, T, seed
//   double    sigma_z2
//   uint64    has_G (0 or 1)
//   complex   Y_0 .. Y_{T-1}, each M_r x M_p column-major, (re, im) pairs
//   complex   G_0 .. G_{T-1}, each N_r x QN_p, present when has_G = 1
// Per-user channels are not stored; they follow from G through user_channels().
void write_batch(const std::string &path, const ReceiveBatch &batch);
ReceiveBatch read_batch(const std::string &path);

} // namespace bdcpm

#endif
