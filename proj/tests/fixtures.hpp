// SPDX-License-Identifier: Apache-2.0
//
// qmimo: energy-efficient precoding for quantized massive MIMO downlink
// Copyright (C) 2026 The qmimo authors
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
#ifndef qmimo_tests_fixtures_H
#define qmimo_tests_fixtures_H

#include "qmimo/aqnm.hpp"
#include "qmimo/channel.hpp"

#include <armadillo>
#include <random>

namespace fixture
{

struct Instance
{
    arma::cx_mat H;
    qmimo::QuantizationProfile profile;
    double P = 1.0;
    double sigma2 = 1.0;
};

inline std::vector<unsigned> random_bits(std::size_t n, unsigned lo, unsigned hi, std::mt19937_64 &rng)
{
    std::uniform_int_distribution<unsigned> u(lo, hi);
    std::vector<unsigned> b(n);
    for (auto &x : b)
        x = u(rng);
    return b;
}

// i.i.d. Rayleigh channel with per-user gains spread over two decades, random
// bit widths and a random SNR between -10 and 30 dB.
inline Instance random_instance(arma::uword N, arma::uword K, std::uint64_t seed, unsigned lo = 1, unsigned hi = 12)
{
    std::mt19937_64 rng(seed);
    Instance in;
    in.H = qmimo::iid_rayleigh(N, K, seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (arma::uword k = 0; k < K; ++k)
        in.H.col(k) *= std::pow(10.0, -u(rng));
    in.profile = qmimo::QuantizationProfile::from_bits(random_bits(N, lo, hi, rng), random_bits(K, lo, hi, rng));
    in.sigma2 = 1.0;
    in.P = std::pow(10.0, (-10.0 + 40.0 * u(rng)) / 10.0);
    return in;
}

// Random precoder scaled to tr(Phi_a W W^H) = fraction.
inline arma::cx_mat random_precoder(const qmimo::QuantizationProfile &p, arma::uword K, std::uint64_t seed,
                                    double fraction = 1.0)
{
    arma::cx_mat W = qmimo::iid_rayleigh(p.n_antennas(), K, seed);
    const double t = arma::accu(p.alpha_bs() % arma::sum(arma::square(arma::abs(W)), 1));
    return W * std::sqrt(fraction / t);
}

// One-ring channel of the default cell with DAC bits U[2,12], ADC bits U[2,6],
// thermal noise and a budget of p_dbm.
inline Instance cell_instance(arma::uword N, arma::uword K, std::uint64_t seed, double p_dbm)
{
    const qmimo::ScenarioGeometry g;
    std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dULL);
    Instance in;
    in.H = qmimo::generate_channel(g, N, K, seed).H;
    in.profile = qmimo::QuantizationProfile::from_bits(random_bits(N, 2, 12, rng), random_bits(K, 2, 6, rng));
    in.sigma2 = qmimo::noise_power_w(g);
    in.P = qmimo::dbm_to_watt(p_dbm);
    return in;
}

} // namespace fixture

#endif
