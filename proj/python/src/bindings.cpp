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

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bdcpm/chest.hpp"
#include "bdcpm/config_io.hpp"
#include "bdcpm/harness.hpp"

namespace py = pybind11;
using namespace bdcpm;

namespace
{

template <typename T> using FArray = py::array_t<T, py::array::f_style | py::array::forcecast>;

template <typename M> py::array to_numpy(const M &m)
{
    using E = typename M::elem_type;
    py::array_t<E, py::array::f_style> out({m.n_rows, m.n_cols});
    std::copy(m.memptr(), m.memptr() + m.n_elem, out.mutable_data());
    return out;
}

template <typename E> arma::Mat<E> from_numpy(const FArray<E> &a)
{
    if (a.ndim() != 2)
        throw Error(ErrorCode::BadDimension, "expected a 2-D array");
    arma::Mat<E> m(a.shape(0), a.shape(1));
    std::copy(a.data(), a.data() + m.n_elem, m.memptr());
    return m;
}

ReceiveBatch batch_from(const std::vector<FArray<std::complex<double>>> &Y, double sigma_z2)
{
    ReceiveBatch b;
    for (const auto &y : Y)
        b.Y.push_back(from_numpy(y));
    b.sigma_z2 = sigma_z2;
    return b;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Beam-domain channel power estimation";

    py::register_exception<Error>(m, "BdcpmError", PyExc_RuntimeError);

    m.def("build_id", [] { return std::string(build_id()); });
    m.def("desk_config_json", [] { return config_to_json(desk_config()); });
    m.def("config_hash", [](const std::string &cfg) { return config_hash(config_from_json(cfg, desk_config())); },
          py::arg("config_json"));

    py::class_<Context>(m, "Context")
        .def(py::init([](const std::string &cfg) { return make_context(config_from_json(cfg, desk_config())); }),
             py::arg("config_json") = "{}")
        .def_property_readonly("config_json", [](const Context &c) { return config_to_json(c.cfg); })
        .def_property_readonly("n_users", [](const Context &c) { return c.dims.K; })
        .def_property_readonly("shape", [](const Context &c) { return py::make_tuple(c.dims.N_r, c.dims.stacked_cols()); })
        .def_property_readonly("obs_shape", [](const Context &c) { return py::make_tuple(c.dims.M_r, c.dims.M_p); })
        .def(
            "simulate",
            [](const Context &c, double snr_db, std::size_t T, std::uint64_t seed, bool unit_energy) {
                const Point pt = simulate_point(c, SynthParams{}, snr_db, T, seed, unit_energy);
                py::list Y;
                for (const auto &y : pt.batch.Y)
                    Y.append(to_numpy(y));
                py::dict d;
                d["Y"] = Y;
                d["omega"] = to_numpy(pt.omega_stacked);
                d["sigma_z2"] = pt.batch.sigma_z2;
                return d;
            },
            py::arg("snr_db"), py::arg("T"), py::arg("seed") = 1, py::arg("unit_energy") = false)
        .def(
            "estimate",
            [](const Context &c, const std::vector<FArray<std::complex<double>>> &Y, double sigma_z2,
               const std::string &estimator, std::size_t iters) {
                ExperimentSpec spec;
                spec.cfg = c.cfg;
                spec.kl.D = iters;
                spec.mf_iters = iters;
                BatchEstimate out = estimate_batch(c, spec, parse_estimator(estimator), batch_from(Y, sigma_z2));
                return py::make_tuple(to_numpy(out.omega), out.iters, out.trace);
            },
            py::arg("Y"), py::arg("sigma_z2"), py::arg("estimator") = "kl-fast", py::arg("iters") = 200)
        .def(
            "nmse_db",
            [](const Context &c, const FArray<double> &hat, const FArray<double> &truth) {
                return nmse_metric(from_numpy(hat), split_per_user(from_numpy(truth), c.dims), c.dims);
            },
            py::arg("omega_hat"), py::arg("omega_true"))
        .def(
            "mmse",
            [](const Context &c, const FArray<std::complex<double>> &Y, const FArray<double> &omega, double sigma_z2) {
                py::list out;
                for (const auto &h : mmse_estimate(from_numpy(Y), from_numpy(omega), c.grids, c.pilots, c.dims, sigma_z2))
                    out.append(to_numpy(h));
                return out;
            },
            py::arg("Y"), py::arg("omega"), py::arg("sigma_z2"));

    m.def(
        "sweep_nmse",
        [](const std::string &cfg, std::vector<double> snr_db, std::vector<long> samples,
           const std::vector<std::string> &estimators, std::size_t reps, std::size_t threads) {
            ExperimentSpec spec;
            spec.cfg = config_from_json(cfg, desk_config());
            spec.snr_db = std::move(snr_db);
            spec.samples = std::move(samples);
            spec.estimators.clear();
            for (const auto &e : estimators)
                spec.estimators.push_back(parse_estimator(e));
            spec.repetitions = reps;
            spec.threads = threads;
            py::gil_scoped_release release;
            return to_csv(run_experiment(spec));
        },
        py::arg("config_json"), py::arg("snr_db"), py::arg("samples"), py::arg("estimators") = std::vector<std::string>{"kl-fast"},
        py::arg("reps") = 1, py::arg("threads") = 1);

    m.def(
        "bench",
        [](std::size_t repeats) {
            py::list out;
            for (const auto &r : bench_fast_vs_dense(default_bench_sizes(), repeats))
            {
                py::dict d;
                d["N_r"] = r.N_r;
                d["QN_p"] = r.QN_p;
                d["dense_ms"] = r.dense_ms;
                d["fast_ms"] = r.fast_ms;
                d["ratio"] = r.ratio;
                d["max_rel_diff"] = r.max_rel_diff;
                out.append(d);
            }
            return out;
        },
        py::arg("repeats") = 3);
}
