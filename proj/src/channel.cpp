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
#include "qmimo/channel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace qmimo
{

namespace
{
constexpr double pi = std::numbers::pi;
constexpr double speed_of_light = 299792458.0;

void require_positive(double v, const char *name)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("geometry.") + name + " must be positive and finite");
}

std::complex<double> one_ring_lag(int lag, double theta, double spread)
{
    if (lag == 0)
        return 1.0;
    if (spread == 0.0)
        return std::polar(1.0, pi * lag * std::sin(theta));

    using boost::math::quadrature::gauss_kronrod;
    const double a = theta - spread, b = theta + spread;
    auto re = [&](double phi) { return std::cos(pi * lag * std::sin(phi)); };
    auto im = [&](double phi) { return std::sin(pi * lag * std::sin(phi)); };
    double r = gauss_kronrod<double, 31>::integrate(re, a, b, 15, 1e-13);
    double i = gauss_kronrod<double, 31>::integrate(im, a, b, 15, 1e-13);
    return {r / (2.0 * spread), i / (2.0 * spread)};
}

void draw_cn(arma::cx_vec &z, std::mt19937_64 &rng)
{
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    for (auto &v : z)
    {
        double re = gauss(rng);
        double im = gauss(rng);
        v = {re, im};
    }
}
} // namespace

void ScenarioGeometry::validate() const
{
    require_positive(cell_radius_m, "cell_radius_m");
    require_positive(min_distance_m, "min_distance_m");
    require_positive(reference_distance_m, "reference_distance_m");
    require_positive(pathloss_exponent, "pathloss_exponent");
    require_positive(carrier_hz, "carrier_hz");
    require_positive(bandwidth_hz, "bandwidth_hz");
    if (!(shadowing_std_db >= 0.0))
        throw std::invalid_argument("geometry.shadowing_std_db must be non-negative");
    if (!std::isfinite(noise_figure_db))
        throw std::invalid_argument("geometry.noise_figure_db must be finite");
    if (!(angular_spread_deg >= 0.0) || angular_spread_deg > 180.0)
        throw std::invalid_argument("geometry.angular_spread_deg must be in [0, 180]");
    if (!(min_distance_m < cell_radius_m))
        throw std::invalid_argument("geometry.min_distance_m must be smaller than cell_radius_m");
}

arma::cx_mat one_ring_correlation(arma::uword n_antennas, double theta_rad, double spread_rad)
{
    if (n_antennas == 0)
        throw std::invalid_argument("one_ring_correlation: n_antennas must be positive");
    if (!(spread_rad >= 0.0))
        throw std::invalid_argument("one_ring_correlation: spread must be non-negative");

    // Toeplitz in m - p, so only N distinct lags are integrated.
    std::vector<std::complex<double>> lag(n_antennas);
    for (arma::uword d = 0; d < n_antennas; ++d)
        lag[d] = one_ring_lag(int(d), theta_rad, spread_rad);

    arma::cx_mat R(n_antennas, n_antennas);
    for (arma::uword p = 0; p < n_antennas; ++p)
        for (arma::uword m = 0; m < n_antennas; ++m)
            R(m, p) = m >= p ? lag[m - p] : std::conj(lag[p - m]);
    return R;
}

arma::cx_mat hermitian_sqrt(const arma::cx_mat &R)
{
    arma::vec eigval;
    arma::cx_mat eigvec;
    if (!arma::eig_sym(eigval, eigvec, arma::symmatu(R)))
        throw std::runtime_error("hermitian_sqrt: eigendecomposition failed");
    eigval.transform([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
    return eigvec * arma::diagmat(eigval) * eigvec.t();
}

double pathloss_db(double distance_m, const ScenarioGeometry &g)
{
    const double fspl = 20.0 * std::log10(4.0 * pi * g.reference_distance_m * g.carrier_hz / speed_of_light);
    return fspl + 10.0 * g.pathloss_exponent * std::log10(distance_m / g.reference_distance_m);
}

ChannelRealization generate_channel(const ScenarioGeometry &geometry, arma::uword n_antennas, arma::uword n_users,
                                    std::uint64_t seed, ChannelModel model)
{
    geometry.validate();
    if (n_antennas == 0 || n_users == 0)
        throw std::invalid_argument("generate_channel: N and K must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(geometry.min_distance_m, geometry.cell_radius_m);
    std::uniform_real_distribution<double> angle(-pi, pi);
    std::normal_distribution<double> shadow(0.0, geometry.shadowing_std_db);
    const double spread = geometry.angular_spread_deg * pi / 180.0;

    ChannelRealization out;
    out.H.set_size(n_antennas, n_users);
    out.pathloss_db.set_size(n_users);
    out.user_distance_m.set_size(n_users);
    out.user_angle_rad.set_size(n_users);

    arma::cx_vec z(n_antennas);
    for (arma::uword k = 0; k < n_users; ++k)
    {
        const double d = dist(rng);
        const double theta = angle(rng);
        const double pl = pathloss_db(d, geometry) + shadow(rng);
        out.user_distance_m[k] = d;
        out.user_angle_rad[k] = theta;
        out.pathloss_db[k] = pl;

        draw_cn(z, rng);
        const double gain = std::sqrt(std::pow(10.0, -pl / 10.0));
        if (model == ChannelModel::OneRing)
            out.H.col(k) = gain * (hermitian_sqrt(one_ring_correlation(n_antennas, theta, spread)) * z);
        else
            out.H.col(k) = gain * z;
    }
    return out;
}

arma::cx_mat iid_rayleigh(arma::uword n_rows, arma::uword n_cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    arma::cx_vec z(n_rows * n_cols);
    draw_cn(z, rng);
    return arma::reshape(z, n_rows, n_cols);
}

double noise_power_dbm(const ScenarioGeometry &g)
{
    return -174.0 + 10.0 * std::log10(g.bandwidth_hz) + g.noise_figure_db;
}

double noise_power_w(const ScenarioGeometry &g) { return dbm_to_watt(noise_power_dbm(g)); }

} // namespace qmimo
