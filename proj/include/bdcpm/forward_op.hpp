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

#ifndef BDCPM_FORWARD_OP_HPP
#define BDCPM_FORWARD_OP_HPP

#include <armadillo>
#include <cstddef>
#include <memory>
#include <mutex>

namespace bdcpm
{

// The linear map G -> A G B, viewed on column-major vectorizations as kron(B^T, A).
// Coefficient (i, j) of G has flat index i + n_rows(G) * j.
class ForwardOperator
{
public:
    ForwardOperator(arma::cx_mat A, arma::cx_mat B);

    std::size_t out_dim() const { return A_.n_rows * B_.n_cols; }
    std::size_t in_dim() const { return A_.n_cols * B_.n_rows; }
    std::size_t g_rows() const { return A_.n_cols; }
    std::size_t g_cols() const { return B_.n_rows; }
    std::size_t y_rows() const { return A_.n_rows; }
    std::size_t y_cols() const { return B_.n_cols; }

    arma::cx_mat apply(const arma::cx_mat &G) const;
    arma::cx_mat adjoint(const arma::cx_mat &Y) const;

    // Column `idx` of the vectorized operator, reshaped as a y_rows x y_cols matrix.
    arma::cx_mat column(std::size_t idx) const;

    // A diag(vec S) A^H for a real weight matrix S of shape g_rows x g_cols.
    arma::cx_mat weighted_gram(const arma::mat &S) const;

    // Dense kron(B^T, A); only for small problems.
    arma::cx_mat dense() const;

    const arma::cx_mat &A() const { return A_; }
    const arma::cx_mat &B() const { return B_; }

private:
    struct GramTables
    {
        std::once_flag once;
        arma::cx_mat kr; // [(a, b), i] = A(a, i) conj(A(b, i))
        arma::cx_mat cb; // [j, (n1, n2)] = B(j, n1) conj(B(j, n2))
    };

    const GramTables &tables() const;

    arma::cx_mat A_, B_;
    std::shared_ptr<GramTables> tables_ = std::make_shared<GramTables>();
};

} // namespace bdcpm

#endif
