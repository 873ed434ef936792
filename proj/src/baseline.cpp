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

#include "bdcpm/baseline.hpp"

#include <cmath>
#include <string>

#include "bdcpm/error.hpp"

namespace bdcpm
{

namespace
{

double regularized_objective(const MmvProblem &pb, const std::vector<arma::cx_mat> &X, const arma::mat &rown, double lambda)
{
    double r = 0.0;
    for (std::size_t t = 0; t < X.size(); ++t)
    {
        const arma::cx_mat e = pb.observations[t] - pb.dictionary.apply(X[t]);
        r += std::pow(arma::norm(e, "fro"), 2);
    }
    return r + (2.0 * lambda / pb.p_norm) * arma::accu(arma::pow(rown, pb.p_norm));
}

} // namespace

MfocussResult mfocuss(const MmvProblem &pb, std::size_t max_iter, double tol)
{
    const auto &A = pb.dictionary;
    const std::size_t n = A.out_dim();
    if (n > pb.max_dim)
        throw Error(ErrorCode::ScaleTooLarge, "solve dimension " + std::to_string(n) + " exceeds " + std::to_string(pb.max_dim));
    if (!(pb.p_norm > 0.0 && pb.p_norm <= 2.0))
        throw Error(ErrorCode::BadConfig, "p_norm must lie in (0, 2]");

    const std::size_t T = pb.observations.size();
    const double lambda = pb.regularized ? (pb.lambda_reg > 0.0 ? pb.lambda_reg : pb.sigma_z2 * double(n)) : 0.0;

    arma::cx_mat Ys(n, T);
    for (std::size_t t = 0; t < T; ++t)
        Ys.col(t) = arma::vectorise(pb.observations[t]);

    MfocussResult res;
    arma::mat W2(A.g_rows(), A.g_cols(), arma::fill::ones);
    std::vector<arma::cx_mat> X(T), Xn(T);

    for (std::size_t it = 0; it < max_iter; ++it)
    {
        arma::cx_mat K = A.weighted_gram(W2);
        arma::cx_mat Z;
        if (lambda > 0.0)
        {
            K.diag() += lambda;
            if (!arma::solve(Z, K, Ys, arma::solve_opts::likely_sympd))
                throw Error(ErrorCode::SolverDiverged, "weighted system is singular");
        }
        else
        {
            Z = arma::pinv(K) * Ys;
        }

        arma::mat rn2(A.g_rows(), A.g_cols(), arma::fill::zeros);
        for (std::size_t t = 0; t < T; ++t)
        {
            Xn[t] = W2 % A.adjoint(arma::reshape(Z.col(t), A.y_rows(), A.y_cols()));
            rn2 += arma::square(arma::abs(Xn[t]));
        }
        const arma::mat rown = arma::sqrt(rn2);
        res.trace.push_back(regularized_objective(pb, Xn, rown, lambda));

        double change = 1.0;
        if (it > 0)
        {
            double num = 0.0, den = 0.0;
            for (std::size_t t = 0; t < T; ++t)
            {
                num += std::pow(arma::norm(Xn[t] - X[t], "fro"), 2);
                den += std::pow(arma::norm(X[t], "fro"), 2);
            }
            change = den > 0.0 ? std::sqrt(num / den) : (num > 0.0 ? 1.0 : 0.0);
        }
        std::swap(X, Xn);
        res.iters = it + 1;
        W2 = arma::pow(rown, 2.0 - pb.p_norm);
        if (change < tol)
        {
            res.converged = true;
            break;
        }
    }

    res.omega_hat.zeros(A.g_rows(), A.g_cols());
    for (const auto &x : X)
        res.omega_hat += arma::square(arma::abs(x));
    if (T > 0)
        res.omega_hat /= double(T);
    res.G_est = std::move(X);
    return res;
}

} // namespace bdcpm
