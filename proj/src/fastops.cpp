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

#include "bdcpm/fastops.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace bdcpm
{

namespace
{

constexpr double pi = 3.14159265358979323846;

// In-place complex transforms over a strided batch. Plans are created once per shape and
// reused; fftw_execute_dft is safe to call concurrently on distinct buffers.
struct PlanKey
{
    int rank, n0, n1, howmany, stride, dist, sign;
    auto tie() const { return std::tie(rank, n0, n1, howmany, stride, dist, sign); }
    bool operator<(const PlanKey &o) const { return tie() < o.tie(); }
};

class PlanCache
{
public:
    ~PlanCache()
    {
        for (auto &kv : plans_)
            fftw_destroy_plan(kv.second);
    }

    fftw_plan get(const PlanKey &k)
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = plans_.find(k);
        if (it != plans_.end())
            return it->second;

        const int n[2] = {k.n0, k.n1};
        const std::size_t len = std::size_t(k.n0) * std::size_t(k.rank == 2 ? k.n1 : 1);
        const std::size_t total = std::size_t(k.howmany - 1) * std::size_t(k.dist) + (len - 1) * std::size_t(k.stride) + 1;
        auto *buf = fftw_alloc_complex(total);
        fftw_plan p = fftw_plan_many_dft(k.rank, n, k.howmany, buf, nullptr, k.stride, k.dist, buf, nullptr, k.stride,
                                         k.dist, k.sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (!p)
            throw Error(ErrorCode::BadSize, "FFTW could not plan the transform");
        plans_.emplace(k, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<PlanKey, fftw_plan> plans_;
};

PlanCache &plan_cache()
{
    static PlanCache cache;
    return cache;
}

void run(const PlanKey &k, arma::cx_double *data)
{
    auto *p = reinterpret_cast<fftw_complex *>(data);
    fftw_execute_dft(plan_cache().get(k), p, p);
}

// Batched 1D transforms of length n.
void fft1(arma::cx_double *data, int n, int howmany, int stride, int dist, int sign)
{
    run(PlanKey{1, n, 1, howmany, stride, dist, sign}, data);
}

arma::cx_vec fft_vec(const arma::cx_vec &x, int sign)
{
    arma::cx_vec y = x;
    fft1(y.memptr(), int(y.n_elem), 1, 1, 1, sign);
    return y;
}

arma::cx_vec raw_circulant_factor(const arma::cx_vec &d, std::size_t N)
{
    if (d.n_elem > N)
        throw Error(ErrorCode::BadSize, "sequence longer than grid");
    // c_k = sum_m d_m exp(+j 2 pi m k / N) is the unnormalized backward transform of the padded d.
    arma::cx_vec c(N, arma::fill::zeros);
    c.head(d.n_elem) = d;
    c = fft_vec(c, FFTW_BACKWARD);
    arma::cx_vec g(N);
    for (arma::uword k = 0; k < N; ++k)
        g(k) = std::norm(c(k));
    return fft_vec(g, FFTW_FORWARD);
}

arma::cx_mat dense_grid(std::size_t M, std::size_t N)
{
    arma::cx_mat A(M, N);
    for (arma::uword k = 0; k < N; ++k)
        for (arma::uword m = 0; m < M; ++m)
            A(m, k) = std::polar(1.0, -2.0 * pi * double((k * m) % N) / double(N));
    return A;
}

} // namespace

arma::cx_mat circulant_from_eigs(const arma::cx_vec &lambda)
{
    const std::size_t N = lambda.n_elem;
    arma::cx_vec g = fft_vec(lambda, FFTW_BACKWARD) / double(N);
    arma::cx_mat C(N, N);
    for (arma::uword j = 0; j < N; ++j)
        for (arma::uword i = 0; i < N; ++i)
            C(i, j) = g((i + N - j) % N);
    return C;
}

double circulant_scale()
{
    static const double s = [] {
        const std::size_t M = 3, N = 6;
        arma::cx_vec d(M);
        for (arma::uword m = 0; m < M; ++m)
            d(m) = std::polar(1.0 + 0.5 * double(m), 0.7 * double(m + 1));
        const arma::cx_mat A = dense_grid(M, N);
        const arma::cx_mat G = A.t() * arma::diagmat(d) * A;
        const arma::cx_mat ref = arma::conv_to<arma::cx_mat>::from(build_t_factor(G));
        const arma::cx_mat fast = circulant_from_eigs(raw_circulant_factor(d, N));
        return std::real(arma::cdot(fast, ref)) / std::real(arma::cdot(fast, fast));
    }();
    return s;
}

arma::cx_vec circulant_factor(const arma::cx_vec &d, std::size_t N)
{
    if (d.n_elem > N)
        throw Error(ErrorCode::BadSize, "M = " + std::to_string(d.n_elem) + " exceeds N = " + std::to_string(N));
    return circulant_scale() * raw_circulant_factor(d, N);
}

SpectralFactors build_factors(const GridSet &grids, const PilotSet &pilots, const DerivedDims &dims)
{
    SpectralFactors f;
    f.N_z = dims.N_z;
    f.N_x = dims.N_x;
    f.N_p = dims.N_p;
    f.Q = dims.Q;
    f.scale = circulant_scale();

    f.lambda_z = arma::real(circulant_factor(arma::cx_vec(dims.M_rz, arma::fill::ones), dims.N_z));
    f.lambda_x = arma::real(circulant_factor(arma::cx_vec(dims.M_rx, arma::fill::ones), dims.N_x));

    // Block (q1, q2) of P P^H has entries sum_m x_q1 conj(x_q2) exp(-j 2 pi (l - l') m / N_p);
    // conjugating d maps this onto the grid convention of circulant_factor.
    f.sigma.assign(dims.Q, std::vector<arma::cx_vec>(dims.Q));
    for (std::size_t q1 = 0; q1 < dims.Q; ++q1)
        for (std::size_t q2 = 0; q2 < dims.Q; ++q2)
        {
            const arma::cx_vec d = pilots.x_tilde[q2] % arma::conj(pilots.x_tilde[q1]);
            f.sigma[q1][q2] = circulant_factor(d, dims.N_p);
        }
    (void)grids;
    return f;
}

arma::mat reconstruct_Ta(const SpectralFactors &f)
{
    const arma::mat Tz = arma::real(circulant_from_eigs(arma::conv_to<arma::cx_vec>::from(f.lambda_z)));
    const arma::mat Tx = arma::real(circulant_from_eigs(arma::conv_to<arma::cx_vec>::from(f.lambda_x)));
    return arma::kron(Tz, Tx);
}

arma::mat reconstruct_Tf(const SpectralFactors &f)
{
    arma::mat T(f.Q * f.N_p, f.Q * f.N_p);
    for (std::size_t q1 = 0; q1 < f.Q; ++q1)
        for (std::size_t q2 = 0; q2 < f.Q; ++q2)
            T.submat(q1 * f.N_p, q2 * f.N_p, (q1 + 1) * f.N_p - 1, (q2 + 1) * f.N_p - 1) =
                arma::real(circulant_from_eigs(f.sigma[q1][q2]));
    return T;
}

arma::mat fast_sandwich(const arma::mat &X, const SpectralFactors &f)
{
    const std::size_t Nr = f.N_z * f.N_x, Np = f.N_p, Q = f.Q;
    if (X.n_rows != Nr || X.n_cols != Q * Np)
        throw Error(ErrorCode::BadDimension, "operand must be N_r x Q N_p");

    arma::cx_mat Xc = arma::conv_to<arma::cx_mat>::from(X);

    // Angle axes: each column is an N_x-fastest N_z x N_x array.
    run(PlanKey{2, int(f.N_z), int(f.N_x), int(Q * Np), 1, int(Nr), FFTW_FORWARD}, Xc.memptr());
    arma::vec la(Nr);
    for (std::size_t kz = 0; kz < f.N_z; ++kz)
        for (std::size_t kx = 0; kx < f.N_x; ++kx)
            la(kz * f.N_x + kx) = f.lambda_z(kz) * f.lambda_x(kx);
    Xc.each_col() %= arma::conv_to<arma::cx_vec>::from(la);

    // Delay axis, per root block. Right multiplication by a circulant with real first
    // column g correlates with g, whose spectrum is conj(lambda).
    for (std::size_t q = 0; q < Q; ++q)
        fft1(Xc.colptr(q * Np), int(Np), int(Nr), int(Nr), 1, FFTW_FORWARD);

    arma::cx_mat Out(Nr, Q * Np, arma::fill::zeros);
    for (std::size_t j = 0; j < Q; ++j)
        for (std::size_t q = 0; q < Q; ++q)
        {
            const arma::cx_rowvec mu = arma::conj(f.sigma[q][j]).st();
            Out.cols(j * Np, (j + 1) * Np - 1) += Xc.cols(q * Np, (q + 1) * Np - 1).each_row() % mu;
        }

    for (std::size_t j = 0; j < Q; ++j)
        fft1(Out.colptr(j * Np), int(Np), int(Nr), int(Nr), 1, FFTW_BACKWARD);
    run(PlanKey{2, int(f.N_z), int(f.N_x), int(Q * Np), 1, int(Nr), FFTW_BACKWARD}, Out.memptr());
    Out /= double(Nr) * double(Np);

    arma::mat re = arma::real(Out);
    const double rn = arma::norm(re, "fro");
    const double in = arma::norm(arma::imag(Out), "fro");
    if (in > 1e-10 * rn && in > 1e-280)
        throw Error(ErrorCode::NumericalResidue, "imaginary residue " + std::to_string(in / rn) + " after sandwich");
    return re;
}

arma::mat fast_model_apply(const arma::mat &omega, const SpectralFactors &f, double noise_floor)
{
    return fast_sandwich(omega, f) + noise_floor;
}

} // namespace bdcpm
