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

#include "bdcpm/chest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bdcpm/channel.hpp"
#include "bdcpm/error.hpp"

namespace bdcpm
{

MmseEstimator::MmseEstimator(ForwardOperator op, arma::mat omega_stacked, double sigma_z2, MmseOptions opts)
    : op_(std::move(op)), omega_(std::move(omega_stacked)), sigma_z2_(sigma_z2), opts_(opts)
{
    if (omega_.n_rows != op_.g_rows() || omega_.n_cols != op_.g_cols())
        throw Error(ErrorCode::BadDimension, "prior shape must match the stacked layout");
    if (omega_.min() < 0.0)
        throw Error(ErrorCode::BadDimension, "prior variances must be >= 0");
    if (!(sigma_z2_ >= 0.0))
        throw Error(ErrorCode::BadDimension, "sigma_z2 must be >= 0");

    if (opts_.solver == MmseSolver::Direct)
    {
        if (op_.out_dim() > opts_.max_dim)
            throw Error(ErrorCode::ScaleTooLarge, "direct solve dimension " + std::to_string(op_.out_dim()) + " exceeds cap");
        arma::cx_mat K = op_.weighted_gram(omega_);
        K.diag() += sigma_z2_;
        K = 0.5 * (K + K.t());
        if (!arma::chol(chol_, K))
            throw Error(ErrorCode::SolverDiverged, "system matrix is not positive definite");
    }
}

arma::cx_mat MmseEstimator::apply_system(const arma::cx_mat &Z) const
{
    return op_.apply(arma::cx_mat(omega_ % op_.adjoint(Z))) + sigma_z2_ * Z;
}

arma::cx_mat MmseEstimator::estimate_G(const arma::cx_mat &Y) const
{
    if (Y.n_rows != op_.y_rows() || Y.n_cols != op_.y_cols())
        throw Error(ErrorCode::BadDimension, "observation shape mismatch");

    arma::cx_mat Z;
    if (opts_.solver == MmseSolver::Direct)
    {
        const arma::cx_vec y = arma::vectorise(Y);
        const arma::cx_vec w = arma::solve(arma::trimatl(chol_.t()), y);
        const arma::cx_vec z = arma::solve(arma::trimatu(chol_), w);
        Z = arma::reshape(z, Y.n_rows, Y.n_cols);
        last_iters_ = 0;
    }
    else
    {
        // Conjugate gradient on the Hermitian positive definite system.
        Z.zeros(Y.n_rows, Y.n_cols);
        arma::cx_mat r = Y, p = Y;
        const double r0 = arma::norm(r, "fro");
        double rr = r0 * r0;
        std::size_t it = 0;
        if (r0 > 0.0)
        {
            for (; it < opts_.max_iter && std::sqrt(rr) > opts_.cg_tol * r0; ++it)
            {
                const arma::cx_mat Kp = apply_system(p);
                const double pKp = std::real(arma::cdot(p, Kp));
                if (!(pKp > 0.0))
                    throw Error(ErrorCode::SolverDiverged, "lost positive definiteness");
                const double a = rr / pKp;
                Z += a * p;
                r -= a * Kp;
                const double rr_new = std::real(arma::cdot(r, r));
                p = r + (rr_new / rr) * p;
                rr = rr_new;
            }
            if (std::sqrt(rr) > opts_.cg_tol * r0)
                throw Error(ErrorCode::SolverDiverged, "residual " + std::to_string(std::sqrt(rr) / r0) + " after " +
                                                           std::to_string(it) + " iterations");
        }
        last_iters_ = it;
    }
    return omega_ % op_.adjoint(Z);
}

std::vector<arma::cx_mat> mmse_estimate(const arma::cx_mat &Y, const arma::mat &omega_stacked, const GridSet &grids,
                                        const PilotSet &pilots, const DerivedDims &dims, double sigma_z2,
                                        const MmseOptions &opts)
{
    const MmseEstimator est(ForwardOperator(grids.V, pilots.P_mat), omega_stacked, sigma_z2, opts);
    return user_channels(est.estimate_G(Y), grids, dims);
}

double to_db(double x, DbBase base)
{
    if (!(x > 0.0))
        return -300.0;
    const double v = base == DbBase::Log10 ? 10.0 * std::log10(x) : 10.0 * std::log2(x);
    return std::max(v, -300.0);
}

double mse_metric(const std::vector<std::vector<arma::cx_mat>> &H_hat, const std::vector<std::vector<arma::cx_mat>> &H_truth,
                  DbBase base)
{
    if (H_hat.size() != H_truth.size())
        throw Error(ErrorCode::BadDimension, "symbol counts differ");
    double e = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < H_hat.size(); ++t)
    {
        if (H_hat[t].size() != H_truth[t].size())
            throw Error(ErrorCode::BadDimension, "user counts differ");
        for (std::size_t k = 0; k < H_hat[t].size(); ++k)
        {
            e += std::pow(arma::norm(H_hat[t][k] - H_truth[t][k], "fro"), 2);
            ++n;
        }
    }
    return to_db(n ? e / double(n) : 0.0, base);
}

} // namespace bdcpm
