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

#include "bdcpm/forward_op.hpp"

#include "bdcpm/error.hpp"
#include "bdcpm/manifold.hpp"

namespace bdcpm
{

ForwardOperator::ForwardOperator(arma::cx_mat A, arma::cx_mat B) : A_(std::move(A)), B_(std::move(B)) {}

const ForwardOperator::GramTables &ForwardOperator::tables() const
{
    std::call_once(tables_->once, [this] {
        const auto Mr = A_.n_rows, Nr = A_.n_cols;
        const auto Mp = B_.n_cols, Nc = B_.n_rows;
        require_dense(Mr * Mr, Nr);
        require_dense(Nc, Mp * Mp);

        auto &kr = tables_->kr;
        kr.set_size(Mr * Mr, Nr);
        for (arma::uword i = 0; i < Nr; ++i)
            for (arma::uword b = 0; b < Mr; ++b)
                for (arma::uword a = 0; a < Mr; ++a)
                    kr(a + Mr * b, i) = A_(a, i) * std::conj(A_(b, i));

        auto &cb = tables_->cb;
        cb.set_size(Nc, Mp * Mp);
        for (arma::uword n2 = 0; n2 < Mp; ++n2)
            for (arma::uword n1 = 0; n1 < Mp; ++n1)
                for (arma::uword j = 0; j < Nc; ++j)
                    cb(j, n1 + Mp * n2) = B_(j, n1) * std::conj(B_(j, n2));
    });
    return *tables_;
}

arma::cx_mat ForwardOperator::apply(const arma::cx_mat &G) const
{
    return A_ * G * B_;
}

arma::cx_mat ForwardOperator::adjoint(const arma::cx_mat &Y) const
{
    return A_.t() * Y * B_.t();
}

arma::cx_mat ForwardOperator::column(std::size_t idx) const
{
    if (idx >= in_dim())
        throw Error(ErrorCode::BadDimension, "column index out of range");
    const auto i = idx % g_rows();
    const auto j = idx / g_rows();
    return A_.col(i) * B_.row(j);
}

arma::cx_mat ForwardOperator::weighted_gram(const arma::mat &S) const
{
    if (S.n_rows != g_rows() || S.n_cols != g_cols())
        throw Error(ErrorCode::BadDimension, "weight shape must match G");
    const auto Mr = A_.n_rows, Mp = B_.n_cols;

    // blocks[(a, b), (n1, n2)] = sum_j sum_i S(i, j) A(a, i) conj A(b, i) B(j, n1) conj B(j, n2)
    const auto &tab = tables();
    const arma::cx_mat rr = tab.kr * arma::conv_to<arma::cx_mat>::from(S);
    const arma::cx_mat blocks = rr * tab.cb;

    arma::cx_mat out(Mr * Mp, Mr * Mp);
    for (arma::uword n2 = 0; n2 < Mp; ++n2)
        for (arma::uword n1 = 0; n1 < Mp; ++n1)
        {
            const arma::uword c = n1 + Mp * n2;
            for (arma::uword b = 0; b < Mr; ++b)
                for (arma::uword a = 0; a < Mr; ++a)
                    out(a + Mr * n1, b + Mr * n2) = blocks(a + Mr * b, c);
        }
    return out;
}

arma::cx_mat ForwardOperator::dense() const
{
    require_dense(out_dim(), in_dim());
    return arma::kron(B_.st(), A_);
}

} // namespace bdcpm
