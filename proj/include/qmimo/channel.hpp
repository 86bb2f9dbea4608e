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
#ifndef qmimo_channel_H
#define qmimo_channel_H

#include <armadillo>
#include <cstdint>

namespace qmimo
{

struct ScenarioGeometry
{
    double cell_radius_m = 1000.0;     // users are dropped up to this distance
    double min_distance_m = 100.0;     // ... and no closer than this
    double reference_distance_m = 100.0; // free-space intercept of the log-distance model
    double pathloss_exponent = 4.0;
    double carrier_hz = 2.4e9;
    double bandwidth_hz = 1e8;         // Omega; also the default DAC sampling rate
    double shadowing_std_db = 8.7;     // std. deviation of the lognormal shadowing in dB
    double noise_figure_db = 5.0;
    double angular_spread_deg = 10.0;  // one-ring half-width Delta

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class ChannelModel
{
    OneRing,  // spatially correlated, half-wavelength ULA
    Rayleigh  // i.i.d. entries, same large-scale fading
};

struct ChannelRealization
{
    arma::cx_mat H;            // N x K, column k is the channel of user k
    arma::vec pathloss_db;     // per user, shadowing included
    arma::vec user_distance_m;
    arma::vec user_angle_rad;
};

// One-ring correlation of a half-wavelength ULA for a user at azimuth `theta`
// with scatterers spread uniformly over [theta - spread, theta + spread]:
// [R]_{m,p} = 1/(2 spread) * int exp(j pi (m-p) sin(phi)) dphi.
// spread == 0 gives the rank-one steering-vector outer product.
arma::cx_mat one_ring_correlation(arma::uword n_antennas, double theta_rad, double spread_rad);

// Hermitian square root with negative eigenvalues clipped to zero.
arma::cx_mat hermitian_sqrt(const arma::cx_mat &R);

// Log-distance pathloss in dB, without shadowing.
double pathloss_db(double distance_m, const ScenarioGeometry &geometry);

// Deterministic for a given seed.
ChannelRealization generate_channel(const ScenarioGeometry &geometry, arma::uword n_antennas, arma::uword n_users,
                                    std::uint64_t seed, ChannelModel model = ChannelModel::OneRing);

// Unit-variance i.i.d. CN(0,1) matrix, no large-scale fading.
arma::cx_mat iid_rayleigh(arma::uword n_rows, arma::uword n_cols, std::uint64_t seed);

// Thermal noise -174 dBm/Hz + 10 log10(bandwidth) + noise figure.
double noise_power_dbm(const ScenarioGeometry &geometry);
double noise_power_w(const ScenarioGeometry &geometry);

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

} // namespace qmimo

#endif
