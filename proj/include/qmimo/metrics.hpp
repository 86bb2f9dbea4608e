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
#ifndef qmimo_metrics_H
#define qmimo_metrics_H

#include "qmimo/aqnm.hpp"

#include <armadillo>
#include <vector>

namespace qmimo
{

struct PowerModelConstants
{
    double p_lp = 0.014;   // low-pass filter [W]
    double p_m = 0.0003;   // mixer [W]
    double p_lo = 0.0225;  // local oscillator [W]
    double p_h = 0.003;    // 90-degree hybrid with buffer [W]
    double kappa = 0.27;   // PA efficiency
    double f_s = 1e8;      // DAC sampling rate [Hz]

    double p_rf() const { return 2.0 * p_lp + 2.0 * p_m + p_h; }
    void validate() const;
};

struct EeBreakdown
{
    double sum_se = 0.0;   // bits/s/Hz
    double p_tx = 0.0;     // radiated power [W]
    double p_cir = 0.0;    // circuit power [W]
    double p_bs = 0.0;     // p_cir + p_tx / kappa [W]
    double ee = 0.0;       // sum_se / p_bs, bandwidth-normalized [bits/J/Hz]
    std::vector<arma::uword> active_antennas;
};

// Slack allowed on tr(Phi_a W W^H) <= 1.
inline constexpr double power_feasibility_tol = 1e-9;
// Rows with squared norm at or below this are treated as switched off.
inline constexpr double active_row_threshold = 1e-14;

// tr(Phi_a W W^H): the fraction of the power budget used by W.
double power_trace(const QuantizationProfile &profile, const arma::cx_mat &W);
// Throws PreconditionError when power_trace exceeds 1 + power_feasibility_tol.
void check_power_feasible(const QuantizationProfile &profile, const arma::cx_mat &W);

// SINR of user k (0-based) including DAC and ADC quantization noise.
double sinr(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile,
            double P, double sigma2, arma::uword k);
arma::vec sinr_all(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile,
                   double P, double sigma2);
arma::vec user_se(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile,
                  double P, double sigma2);
double sum_se(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile,
              double P, double sigma2);

// Power drawn by one DAC [W].
double dac_power(unsigned bits, double f_s);
// DAC pair plus RF chain of one active antenna, 2 P_DAC + P_RF [W].
double antenna_power(unsigned bits, const PowerModelConstants &c);

std::vector<arma::uword> active_set(const arma::cx_mat &W);

// Circuit and total BS power for a given active set and radiated power.
// sum_se and ee are left at zero.
EeBreakdown bs_power(const std::vector<arma::uword> &active, const QuantizationProfile &profile,
                     const PowerModelConstants &c, double p_tx);
EeBreakdown bs_power(const arma::cx_mat &W, const QuantizationProfile &profile, const PowerModelConstants &c,
                     double P);

// Full metric evaluation of a precoder; the active set is read off W.
EeBreakdown evaluate(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile,
                     double P, double sigma2, const PowerModelConstants &c);

} // namespace qmimo

#endif
