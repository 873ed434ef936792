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

#include "bdcpm/batch_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace bdcpm
{

namespace
{

constexpr char magic[8] = {'B', 'D', 'C', 'P', 'M', 'R', 'X', '1'};

void put_u64(std::ofstream &f, std::uint64_t v)
{
    f.write(reinterpret_cast<const char *>(&v), sizeof(v));
}

std::uint64_t get_u64(std::ifstream &f)
{
    std::uint64_t v = 0;
    f.read(reinterpret_cast<char *>(&v), sizeof(v));
    return v;
}

void put_mat(std::ofstream &f, const arma::cx_mat &m)
{
    f.write(reinterpret_cast<const char *>(m.memptr()), std::streamsize(m.n_elem * sizeof(arma::cx_double)));
}

arma::cx_mat get_mat(std::ifstream &f, std::uint64_t r, std::uint64_t c)
{
    arma::cx_mat m(r, c);
    f.read(reinterpret_cast<char *>(m.memptr()), std::streamsize(m.n_elem * sizeof(arma::cx_double)));
    return m;
}

} // namespace

void write_batch(const std::string &path, const ReceiveBatch &batch)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorCode::Io, "cannot write " + path);

    const std::uint64_t T = batch.Y.size();
    const std::uint64_t Mr = T ? batch.Y[0].n_rows : 0, Mp = T ? batch.Y[0].n_cols : 0;
    const bool has_G = !batch.G_truth.empty();
    const std::uint64_t Nr = has_G ? batch.G_truth[0].n_rows : 0, QNp = has_G ? batch.G_truth[0].n_cols : 0;

    f.write(magic, sizeof(magic));
    put_u64(f, Mr);
    put_u64(f, Mp);
    put_u64(f, Nr);
    put_u64(f, QNp);
    put_u64(f, T);
    put_u64(f, batch.seed);
    f.write(reinterpret_cast<const char *>(&batch.sigma_z2), sizeof(double));
    put_u64(f, has_G ? 1 : 0);
    for (const auto &Y : batch.Y)
        put_mat(f, Y);
    if (has_G)
        for (const auto &G : batch.G_truth)
            put_mat(f, G);
    if (!f)
        throw Error(ErrorCode::Io, "write failed for " + path);
}

ReceiveBatch read_batch(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error(ErrorCode::Io, "cannot open " + path);

    char m[8];
    f.read(m, sizeof(m));
    if (!f || std::memcmp(m, magic, sizeof(magic)) != 0)
        throw Error(ErrorCode::Io, path + " is not a batch file");

    const auto Mr = get_u64(f), Mp = get_u64(f), Nr = get_u64(f), QNp = get_u64(f), T = get_u64(f);
    ReceiveBatch b;
    b.seed = get_u64(f);
    f.read(reinterpret_cast<char *>(&b.sigma_z2), sizeof(double));
    const bool has_G = get_u64(f) != 0;

    for (std::uint64_t t = 0; t < T; ++t)
        b.Y.push_back(get_mat(f, Mr, Mp));
    if (has_G)
        for (std::uint64_t t = 0; t < T; ++t)
            b.G_truth.push_back(get_mat(f, Nr, QNp));
    if (!f)
        throw Error(ErrorCode::Io, path + " is truncated");
    return b;
}

} // namespace bdcpm
