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

#include "bdcpm/forward_op.hpp"
#include "bdcpm/pilots.hpp"
#include "testutil.hpp"

using namespace bdcpm;

// Covered tests:
// - apply / adjoint against the dense Kronecker matrix
// - Adjoint identity
// - Column spot checks
// - Weighted Gram against A diag(s) A^H

TEST_CASE("Forward operator against dense Kronecker form")
{
    SystemConfig cfg = desk_config();
    cfg.M_rz = cfg.M_rx = 2;
    cfg.M_p = 8;
    cfg.M_c = 64;
    cfg.Q = 2;
    cfg.P_per_root = {2, 2};
    const DerivedDims d = validate(cfg);
    const GridSet g = build_grids(cfg, d);
    const PilotSet ps = build_pilot_matrix(cfg, d, g);
    const ForwardOperator A(g.V, ps.P_mat);
    const arma::cx_mat Ad = A.dense();
    REQUIRE(Ad.n_rows == A.out_dim());
    REQUIRE(Ad.n_cols == A.in_dim());

    Rng rng = make_rng(1);
    for (int trial = 0; trial < 5; ++trial)
    {
        const arma::cx_mat G = testutil::rand_cx(rng, A.g_rows(), A.g_cols());
        const arma::cx_mat Y = testutil::rand_cx(rng, A.y_rows(), A.y_cols());
        CHECK(testutil::rel_fro(arma::cx_mat(arma::vectorise(A.apply(G))), arma::cx_mat(Ad * arma::vectorise(G))) < 1e-12);
        CHECK(testutil::rel_fro(arma::cx_mat(arma::vectorise(A.adjoint(Y))), arma::cx_mat(Ad.t() * arma::vectorise(Y))) < 1e-12);
        const std::complex<double> lhs = arma::cdot(Y, A.apply(G));
        const std::complex<double> rhs = arma::cdot(A.adjoint(Y), G);
        CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(lhs));
    }

    for (int trial = 0; trial < 10; ++trial)
    {
        const std::size_t idx = testutil::rand_int(rng, 0, A.in_dim() - 1);
        const arma::cx_vec col = arma::vectorise(A.column(idx));
        CHECK(arma::abs(col - Ad.col(idx)).max() <= 1e-10);
    }

    const arma::mat S = testutil::rand_mat(rng, A.g_rows(), A.g_cols());
    const arma::cx_mat ref = Ad * arma::diagmat(arma::conv_to<arma::cx_vec>::from(arma::vectorise(S))) * Ad.t();
    CHECK(testutil::rel_fro(A.weighted_gram(S), ref) < 1e-12);
}
