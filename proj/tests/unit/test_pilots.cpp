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

#include <catch_amalgamated.hpp>

#include "bdcpm/pilots.hpp"
#include "testutil.hpp"

using namespace bdcpm;

// Covered tests:
// - Prime search and ZC sequence values
// - Root validation and selection
// - Stacked pilot matrix shape, modulus, row norms and block structure
// - Per-user pilots as shifted base sequences
// - Same-root orthogonality after delay truncation

namespace
{
constexpr double pi = 3.14159265358979323846;

std::size_t prime_scan(std::size_t n)
{
    std::size_t best = 0;
    for (std::size_t c = 2; c < n; ++c)
    {
        bool prime = true;
        for (std::size_t d = 2; d < c; ++d)
            prime = prime && (c % d != 0);
        if (prime)
            best = c;
    }
    return best;
}
} // namespace

TEST_CASE("Largest prime below")
{
    CHECK(largest_prime_below(120) == 113);
    CHECK(largest_prime_below(5) == 3);
    CHECK(largest_prime_below(24) == 23);
    for (std::size_t n = 3; n < 400; ++n)
        CHECK(largest_prime_below(n) == prime_scan(n));
    CHECK_THROWS_AS(largest_prime_below(2), Error);
}

TEST_CASE("ZC sequence values")
{
    const arma::cx_vec x = zc_sequence(1, 5);
    REQUIRE(x.n_elem == 5);
    for (std::size_t n = 0; n < 5; ++n)
    {
        const std::complex<double> ref = std::exp(std::complex<double>(0.0, -pi * double(n * (n + 1)) / 3.0));
        CHECK(std::abs(x(n) - ref) < 1e-14);
    }

    for (std::size_t root : {1u, 2u, 7u, 50u, 112u})
    {
        const arma::cx_vec z = zc_sequence(root, 120);
        CHECK(z(0) == std::complex<double>(1.0, 0.0));
        CHECK(arma::abs(arma::abs(z) - 1.0).max() < 1e-14);
        for (std::size_t n = 0; n < 120; ++n)
        {
            const std::complex<double> ref = std::exp(std::complex<double>(0.0, -pi * double(root) * double(n * (n + 1)) / 113.0));
            CHECK(std::abs(z(n) - ref) < 1e-11);
        }
    }
}

TEST_CASE("Root validation")
{
    auto code_of = [](std::size_t root, std::size_t Mp) {
        try
        {
            zc_sequence(root, Mp);
        }
        catch (const Error &e)
        {
            return e.code();
        }
        return ErrorCode::Io;
    };
    CHECK(code_of(0, 24) == ErrorCode::BadRoot);
    CHECK(code_of(23, 24) == ErrorCode::BadRoot);
    CHECK(code_of(30, 24) == ErrorCode::BadRoot);
    CHECK(select_roots(2, 23) == std::vector<std::size_t>{1, 2});
    CHECK_THROWS_AS(select_roots(3, 3), Error);
}

TEST_CASE("Identity pilot gives P = U^T")
{
    const SystemConfig cfg = desk_config();
    const DerivedDims d = validate(cfg);
    const GridSet g = build_grids(cfg, d);
    const PilotSet ps = build_pilot_matrix({arma::cx_vec(d.M_p, arma::fill::ones)}, cfg, d, g);
    CHECK(arma::approx_equal(ps.P_mat, arma::cx_mat(g.U.st()), "absdiff", 0.0));
}

TEST_CASE("Stacked pilot matrix")
{
    for (const long Q : {1L, 2L})
    {
        SystemConfig cfg = desk_config();
        cfg.Q = Q;
        cfg.P_per_root.assign(std::size_t(Q), 6);
        const DerivedDims d = validate(cfg);
        const GridSet g = build_grids(cfg, d);
        const PilotSet ps = build_pilot_matrix(cfg, d, g);

        CHECK(ps.N_l == 23);
        CHECK(ps.P_mat.n_rows == d.Q * d.N_p);
        CHECK(ps.P_mat.n_cols == d.M_p);
        CHECK(arma::abs(arma::abs(ps.P_mat) - 1.0).max() < 1e-13);

        const arma::vec rows = arma::sum(arma::square(arma::abs(ps.P_mat)), 1);
        CHECK(arma::abs(rows - double(d.M_p)).max() < 1e-11);

        for (std::size_t q = 0; q < d.Q; ++q)
        {
            const arma::cx_mat blk = g.U.st() * arma::diagmat(ps.x_tilde[q]);
            CHECK(testutil::rel_fro(arma::cx_mat(ps.P_mat.rows(q * d.N_p, (q + 1) * d.N_p - 1)), blk) < 1e-14);
            for (std::size_t p = 0; p < d.P_per_root[q]; ++p)
            {
                const arma::cx_vec ref = ps.x_tilde[q] % delay_basis(pilot_shift_delay(p, d, cfg.delta_f), cfg.delta_f, d.M_p);
                CHECK(testutil::rel_fro(arma::cx_mat(ps.x_user[q][p]), arma::cx_mat(ref)) < 1e-12);
                CHECK(arma::norm(ps.x_user[q][p]) * arma::norm(ps.x_user[q][p]) == Catch::Approx(double(d.M_p)).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("Same-root users do not overlap at the physical delay resolution")
{
    // Matched filter of user p seeing user p': U_f^T B_p X X^H B_p'^H U_f^*. On the
    // N_ap = 1 grid U_f spans exactly the M_f physical taps and the cross term vanishes
    // for every pair within the cap. Oversampled grids leak by construction.
    auto cross_norm = [](const SystemConfig &cfg, std::size_t p, std::size_t pp) {
        const DerivedDims d = derive_dims(cfg);
        const GridSet g = build_grids(cfg, d);
        const arma::cx_vec x = zc_sequence(1, d.M_p);
        const arma::cx_vec bp = delay_basis(pilot_shift_delay(p, d, cfg.delta_f), cfg.delta_f, d.M_p);
        const arma::cx_vec bq = delay_basis(pilot_shift_delay(pp, d, cfg.delta_f), cfg.delta_f, d.M_p);
        const arma::cx_mat cross = g.U_f.st() * arma::diagmat(bp % x % arma::conj(x) % arma::conj(bq)) * arma::conj(g.U_f);
        const arma::cx_mat self = g.U_f.st() * arma::diagmat(x % arma::conj(x)) * arma::conj(g.U_f);
        return arma::norm(cross, "fro") / arma::norm(self, "fro");
    };

    SystemConfig cfg = desk_config();
    cfg.N_az = cfg.N_ax = cfg.N_ap = 1.0;
    const DerivedDims d = validate(cfg);
    for (std::size_t p = 0; p < d.users_per_root_cap; ++p)
        for (std::size_t pp = 0; pp < d.users_per_root_cap; ++pp)
            if (p != pp)
                CHECK(cross_norm(cfg, p, pp) <= 1e-9);

    // One slot past the cap wraps onto slot 0.
    CHECK(cross_norm(cfg, 0, d.users_per_root_cap) > 0.5);
}
