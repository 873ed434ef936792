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

#include "bdcpm/powerest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace bdcpm
{

namespace
{
constexpr double phi_zero = 1e-30;
}

DenseSandwich::DenseSandwich(arma::mat T_left, arma::mat T_right) : T_left_(std::move(T_left)), T_right_(std::move(T_right))
{
}

arma::mat DenseSandwich::apply(const arma::mat &X) const
{
    if (X.n_rows != T_left_.n_cols || X.n_cols != T_right_.n_rows)
        throw Error(ErrorCode::BadDimension, "sandwich operand has the wrong shape");
    return T_left_ * X * T_right_;
}

arma::mat build_t_factor(const arma::cx_mat &C)
{
    return arma::square(arma::real(C)) + arma::square(arma::imag(C));
}

DenseSandwich make_dense_sandwich(const GridSet &grids, const PilotSet &pilots)
{
    require_dense(grids.V.n_cols, grids.V.n_cols);
    require_dense(pilots.P_mat.n_rows, pilots.P_mat.n_rows);
    return DenseSandwich(build_t_factor(grids.V.t() * grids.V), build_t_factor(pilots.P_mat * pilots.P_mat.t()));
}

DenseSandwich BilinearModel::sandwich() const
{
    return DenseSandwich(build_t_factor(A.t() * A), build_t_factor(B * B.t()));
}

arma::mat BilinearModel::noise_floor() const
{
    const arma::vec a = arma::sum(arma::square(arma::abs(A)), 0).t();
    const arma::rowvec b = arma::sum(arma::square(arma::abs(B)), 1).t();
    return sigma_z2 * (a * b);
}

MomentObservation BilinearModel::observe(const std::vector<arma::cx_mat> &Y) const
{
    MomentObservation obs;
    obs.phi.zeros(A.n_cols, B.n_rows);
    const arma::cx_mat Ah = A.t(), Bh = B.t();
    for (const auto &y : Y)
        obs.phi += build_t_factor(Ah * y * Bh);
    if (!Y.empty())
        obs.phi /= double(Y.size());
    obs.T_used = Y.size();
    obs.noise = noise_floor();
    return obs;
}

MomentObservation accumulate_phi(const ReceiveBatch &batch, const GridSet &grids, const PilotSet &pilots)
{
    return BilinearModel{grids.V, pilots.P_mat, batch.sigma_z2}.observe(batch.Y);
}

double kl_objective(const arma::mat &phi, const arma::mat &model)
{
    if (phi.n_rows != model.n_rows || phi.n_cols != model.n_cols)
        throw Error(ErrorCode::BadDimension, "phi and model shapes differ");
    double f = 0.0;
    for (arma::uword i = 0; i < phi.n_elem; ++i)
    {
        const double m = model(i);
        if (!(m > 0.0))
            throw Error(ErrorCode::NonpositiveModel, "model entry " + std::to_string(i) + " is " + std::to_string(m));
        const double p = phi(i);
        if (p >= phi_zero)
            f += p * std::log(p / m) - p;
        f += m;
    }
    return f;
}

arma::mat model_matrix(const arma::mat &M, const MomentObservation &obs, const SandwichOperator &op)
{
    return op.apply(M % M) + obs.noise;
}

double kl_objective(const arma::mat &M, const MomentObservation &obs, const SandwichOperator &op)
{
    return kl_objective(obs.phi, model_matrix(M, obs, op));
}

namespace
{

arma::mat quotient(const arma::mat &phi, const arma::mat &model)
{
    arma::mat q(phi.n_rows, phi.n_cols);
    for (arma::uword i = 0; i < phi.n_elem; ++i)
    {
        if (!(model(i) > 0.0))
            throw Error(ErrorCode::NonpositiveModel, "model entry " + std::to_string(i) + " is " + std::to_string(model(i)));
        q(i) = phi(i) >= phi_zero ? phi(i) / model(i) : 0.0;
    }
    return q;
}

arma::mat gradient_from(const arma::mat &M, const arma::mat &phi, const arma::mat &model, const arma::mat &c1,
                        const SandwichOperator &op)
{
    return 2.0 * (c1 - op.apply(quotient(phi, model))) % M;
}

} // namespace

arma::mat kl_gradient(const arma::mat &M, const MomentObservation &obs, const SandwichOperator &op)
{
    const arma::mat ones(M.n_rows, M.n_cols, arma::fill::ones);
    return gradient_from(M, obs.phi, model_matrix(M, obs, op), op.apply(ones), op);
}

namespace
{

EstimatorState run_estimate(const MomentObservation &obs, const SandwichOperator &op, const EstimatorOptions &opts,
                            const arma::mat *M0)
{
    if (opts.D < 1 || !(opts.alpha > 0.0 && opts.alpha < 1.0) || !(opts.delta_min_rel > 0.0 && opts.delta_min_rel < 1.0) ||
        !(opts.step_growth >= 1.0))
        throw Error(ErrorCode::BadConfig, "invalid estimator options");
    if (obs.phi.n_rows != op.n_rows() || obs.phi.n_cols != op.n_cols())
        throw Error(ErrorCode::BadDimension, "observation does not match operator");

    const arma::mat ones(obs.phi.n_rows, obs.phi.n_cols, arma::fill::ones);
    const arma::mat c1 = op.apply(ones);

    EstimatorState st;
    if (M0)
    {
        if (M0->n_rows != obs.phi.n_rows || M0->n_cols != obs.phi.n_cols)
            throw Error(ErrorCode::BadDimension, "M0 has the wrong shape");
        st.M = *M0;
    }
    else
    {
        const double scale = opts.init == InitMode::Matched ? arma::mean(arma::vectorise(c1)) : double(obs.phi.n_elem);
        st.M = arma::sqrt(arma::clamp(obs.phi, 0.0, std::numeric_limits<double>::max()) / scale);
    }

    const double delta0 = opts.delta0 > 0.0 ? opts.delta0 : 1.0 / c1.max();
    const double delta_min = opts.delta_min_rel * delta0;
    st.step = delta0;

    arma::mat model = op.apply(st.M % st.M) + obs.noise;
    double f = kl_objective(obs.phi, model);
    st.trace.push_back(f);

    while (st.iter < opts.D)
    {
        const arma::mat g = gradient_from(st.M, obs.phi, model, c1, op);
        bool accepted = false;
        arma::mat M_new, model_new;
        double f_new = f;
        while (st.step > delta_min)
        {
            M_new = st.M - st.step * g;
            model_new = op.apply(M_new % M_new) + obs.noise;
            f_new = kl_objective(obs.phi, model_new);
            if (f_new < f)
            {
                accepted = true;
                break;
            }
            st.step *= opts.alpha;
        }
        if (!accepted)
        {
            st.stop = StopReason::StepUnderflow;
            break;
        }
        st.M = std::move(M_new);
        model = std::move(model_new);
        f = f_new;
        st.trace.push_back(f);
        ++st.iter;
        st.step *= opts.step_growth;
    }
    st.omega = st.M % st.M;
    return st;
}

} // namespace

EstimatorState estimate(const MomentObservation &obs, const SandwichOperator &op, const EstimatorOptions &opts)
{
    return run_estimate(obs, op, opts, nullptr);
}

EstimatorState estimate(const MomentObservation &obs, const SandwichOperator &op, const EstimatorOptions &opts,
                        const arma::mat &M0)
{
    return run_estimate(obs, op, opts, &M0);
}

std::vector<BeamPowerMap> split_per_user(const arma::mat &stacked, const DerivedDims &dims)
{
    if (stacked.n_rows != dims.N_r || stacked.n_cols != dims.stacked_cols())
        throw Error(ErrorCode::LayoutMismatch, "stacked matrix must be N_r x Q N_p");
    std::vector<BeamPowerMap> out;
    for (const auto &s : user_slots(dims))
    {
        const auto c0 = user_column(dims, s.q, s.p);
        BeamPowerMap b;
        b.omega = stacked.cols(c0, c0 + dims.N_f - 1);
        b.m_root = arma::sqrt(arma::clamp(b.omega, 0.0, std::numeric_limits<double>::max()));
        out.push_back(std::move(b));
    }
    return out;
}

arma::mat embed_per_user(const std::vector<arma::mat> &maps, const DerivedDims &dims)
{
    const auto slots = user_slots(dims);
    if (maps.size() != slots.size())
        throw Error(ErrorCode::LayoutMismatch, "map count does not match the allocation");
    arma::mat out(dims.N_r, dims.stacked_cols(), arma::fill::zeros);
    for (std::size_t k = 0; k < slots.size(); ++k)
    {
        if (maps[k].n_rows != dims.N_r || maps[k].n_cols != dims.N_f)
            throw Error(ErrorCode::LayoutMismatch, "map shape must be N_r x N_f");
        const auto c0 = user_column(dims, slots[k].q, slots[k].p);
        out.cols(c0, c0 + dims.N_f - 1) = maps[k];
    }
    return out;
}

arma::mat embed_per_user(const std::vector<BeamPowerMap> &maps, const DerivedDims &dims)
{
    std::vector<arma::mat> m;
    for (const auto &b : maps)
        m.push_back(b.omega);
    return embed_per_user(m, dims);
}

BeamPowerMap estimate_flat(const std::vector<arma::cx_mat> &Y, const arma::cx_mat &V_r, const arma::cx_mat &V_t,
                           const arma::cx_mat &X_k, double sigma_z2, const EstimatorOptions &opts)
{
    const BilinearModel model{V_r, V_t.st() * X_k, sigma_z2};
    const MomentObservation obs = model.observe(Y);
    const EstimatorState st = estimate(obs, model.sandwich(), opts);
    return BeamPowerMap{st.omega, arma::abs(st.M)};
}

double estimate_noise_from_guard(const arma::mat &phi, const DerivedDims &dims)
{
    std::vector<double> v;
    for (std::size_t q = 0; q < dims.Q; ++q)
        for (std::size_t c = dims.P_per_root[q] * dims.N_f; c < dims.N_p; ++c)
        {
            const arma::vec col = phi.col(q * dims.N_p + c);
            v.insert(v.end(), col.begin(), col.end());
        }
    if (v.empty())
        throw Error(ErrorCode::BadDimension, "no empty delay columns to estimate noise from");
    const auto mid = v.begin() + std::ptrdiff_t(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid / (double(dims.M_r) * double(dims.M_p));
}

void write_matrix_csv(const std::string &path, const arma::mat &m)
{
    std::ofstream f(path);
    if (!f)
        throw Error(ErrorCode::Io, "cannot write " + path);
    f << "# rows=" << m.n_rows << ",cols=" << m.n_cols << "\n";
    char buf[32];
    for (arma::uword i = 0; i < m.n_rows; ++i)
    {
        for (arma::uword j = 0; j < m.n_cols; ++j)
        {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            f << (j ? "," : "") << buf;
        }
        f << "\n";
    }
}

void write_trace_csv(const std::string &path, const std::vector<double> &trace)
{
    std::ofstream f(path);
    if (!f)
        throw Error(ErrorCode::Io, "cannot write " + path);
    f << "iter,objective\n";
    char buf[32];
    for (std::size_t i = 0; i < trace.size(); ++i)
    {
        std::snprintf(buf, sizeof(buf), "%.17g", trace[i]);
        f << i << "," << buf << "\n";
    }
}

} // namespace bdcpm
