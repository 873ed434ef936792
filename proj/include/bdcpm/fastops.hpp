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

#ifndef BDCPM_FASTOPS_HPP
#define BDCPM_FASTOPS_HPP

#include <armadillo>
#include <cstddef>
#include <vector>

#include "bdcpm/manifold.hpp"
#include "bdcpm/pilots.hpp"
#include "bdcpm/powerest.hpp"
#include "bdcpm/sysmodel.hpp"

namespace bdcpm
{

// Eigenvalues of circulant matrices C with C(k, k') = g((k - k') mod N), so that
// C x = ifft(lambda % fft(x)) with an unnormalized forward transform.
struct SpectralFactors
{
    arma::vec lambda_z;                            // N_z
    arma::vec lambda_x;                            // N_x
    std::vector<std::vector<arma::cx_vec>> sigma;  // [q1][q2], N_p each; block (q1, q2) of T_f
    double scale = 1.0;                            // calibration constant folded into every factor
    std::size_t N_z = 0, N_x = 0, N_p = 0, Q = 0;
};

// Calibration constant for circulant_factor, computed once per process against a dense
// reference at N = 6, M = 3.
double circulant_scale();

// Eigenvalues of (A^H D A) % conj(A^H D A), where A is the M x N grid with
// A(m, k) = exp(-j 2 pi k m / N) and D = diag(d), M = d.n_elem.
// Real and nonnegative when d is real; complex in general.
arma::cx_vec circulant_factor(const arma::cx_vec &d, std::size_t N);

// Dense circulant with the given eigenvalues.
arma::cx_mat circulant_from_eigs(const arma::cx_vec &lambda);

SpectralFactors build_factors(const GridSet &grids, const PilotSet &pilots, const DerivedDims &dims);

// Dense T_a and T_f rebuilt from the factors, for validation.
arma::mat reconstruct_Ta(const SpectralFactors &f);
arma::mat reconstruct_Tf(const SpectralFactors &f);

// T_a X T_f using only length-N transforms and diagonal scalings.
arma::mat fast_sandwich(const arma::mat &X, const SpectralFactors &f);

// T_a omega T_f + noise_floor
arma::mat fast_model_apply(const arma::mat &omega, const SpectralFactors &f, double noise_floor);

class FastSandwich final : public SandwichOperator
{
public:
    explicit FastSandwich(SpectralFactors f) : f_(std::move(f)) {}

    arma::mat apply(const arma::mat &X) const override { return fast_sandwich(X, f_); }
    std::size_t n_rows() const override { return f_.N_z * f_.N_x; }
    std::size_t n_cols() const override { return f_.Q * f_.N_p; }

    const SpectralFactors &factors() const { return f_; }

private:
    SpectralFactors f_;
};

} // namespace bdcpm

#endif
