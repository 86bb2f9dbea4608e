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
#include "qmimo/metrics.hpp"
#include "qmimo/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmimo
{

void PowerModelConstants::validate() const
{
    auto positive = [](double v, const char *name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string("power_model.") + name + " must be positive");
    };
    positive(p_lp, "p_lp");
    positive(p_m, "p_m");
    positive(p_lo, "p_lo");
    positive(p_h, "p_h");
    positive(f_s, "f_s");
    if (!(kappa > 0.0 && kappa <= 1.0))
        throw std::invalid_argument("power_model.kappa must be in (0, 1]");
}

double power_trace(const QuantizationProfile &profile, const arma::cx_mat &W)
{
    if (W.n_rows != profile.n_antennas())
        throw PreconditionError("power_trace: W rows do not match the number of antennas");
    return arma::dot(profile.alpha_bs(), arma::sum(arma::square(arma::abs(W)), 1));
}

void check_power_feasible(const QuantizationProfile &profile, const arma::cx_mat &W)
{
    const double t = power_trace(profile, W);
    if (!(t <= 1.0 + power_feasibility_tol))
        throw PreconditionError("precoder violates the power constraint: tr(Phi_a W W^H) = " + std::to_string(t));
}

static void check_dims(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile)
{
    if (H.n_rows != W.n_rows || H.n_cols != W.n_cols)
        throw PreconditionError("H and W must both be N x K");
    if (H.n_rows != profile.n_antennas() || H.n_cols != profile.n_users())
        throw PreconditionError("channel dimensions do not match the quantization profile");
}

// Compact form: alpha_k |s_k|^2 / (sum_l |s_l|^2 - alpha_k |s_k|^2 + DAC noise + sigma2/P),
// with s = h_k^H Phi_a W. Dimensions and feasibility are checked by the caller.
static double sinr_unchecked(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile,
                             double P, double sigma2, const arma::vec &row_power_ab, arma::uword k)
{
    const arma::cx_vec h = H.col(k);
    const arma::cx_rowvec s = arma::trans(h % profile.alpha_bs()) * W;
    const double ak = profile.alpha_ue()[k];
    const double desired = std::norm(s[k]);
    const double num = ak * desired;
    if (num == 0.0)
        return 0.0;

    const double total = arma::accu(arma::square(arma::abs(s)));
    const double dac_noise = arma::dot(arma::square(arma::abs(h)), row_power_ab);
    return num / (total - ak * desired + dac_noise + sigma2 / P);
}

static arma::vec weighted_row_power(const QuantizationProfile &profile, const arma::cx_mat &W)
{
    // alpha_n beta_n sum_l |w_nl|^2
    return profile.alpha_bs() % profile.beta_bs() % arma::sum(arma::square(arma::abs(W)), 1);
}

double sinr(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile,
            double P, double sigma2, arma::uword k)
{
    check_dims(H, W, profile);
    if (k >= H.n_cols)
        throw PreconditionError("sinr: user index out of range");
    if (!(P > 0.0))
        throw PreconditionError("sinr: transmit power must be positive");
    check_power_feasible(profile, W);
    return sinr_unchecked(H, W, profile, P, sigma2, weighted_row_power(profile, W), k);
}

arma::vec sinr_all(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile,
                   double P, double sigma2)
{
    check_dims(H, W, profile);
    if (!(P > 0.0))
        throw PreconditionError("sinr: transmit power must be positive");
    check_power_feasible(profile, W);
    const arma::vec rp = weighted_row_power(profile, W);
    arma::vec out(H.n_cols);
    for (arma::uword k = 0; k < H.n_cols; ++k)
        out[k] = sinr_unchecked(H, W, profile, P, sigma2, rp, k);
    return out;
}

arma::vec user_se(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile,
                  double P, double sigma2)
{
    arma::vec g = sinr_all(H, W, profile, P, sigma2);
    return arma::log2(1.0 + g);
}

double sum_se(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile,
              double P, double sigma2)
{
    return arma::accu(user_se(H, W, profile, P, sigma2));
}

double dac_power(unsigned bits, double f_s)
{
    if (bits == 0)
        throw std::invalid_argument("dac_power: bit width must be at least 1");
    if (!(f_s > 0.0))
        throw std::invalid_argument("dac_power: sampling rate must be positive");
    return 1.5e-5 * std::exp2(double(bits)) + 9e-12 * f_s * double(bits);
}

double antenna_power(unsigned bits, const PowerModelConstants &c)
{
    return 2.0 * dac_power(bits, c.f_s) + c.p_rf();
}

std::vector<arma::uword> active_set(const arma::cx_mat &W)
{
    std::vector<arma::uword> out;
    const arma::vec rp = arma::sum(arma::square(arma::abs(W)), 1);
    for (arma::uword n = 0; n < rp.n_elem; ++n)
        if (rp[n] > active_row_threshold)
            out.push_back(n);
    return out;
}

EeBreakdown bs_power(const std::vector<arma::uword> &active, const QuantizationProfile &profile,
                     const PowerModelConstants &c, double p_tx)
{
    if (!(p_tx >= 0.0))
        throw PreconditionError("bs_power: transmit power must be non-negative");

    EeBreakdown b;
    b.p_cir = c.p_lo;
    for (arma::uword n : active)
    {
        if (n >= profile.n_antennas())
            throw PreconditionError("bs_power: antenna index out of range");
        b.p_cir += antenna_power(profile.dac_bits()[n], c);
    }
    b.p_tx = p_tx;
    b.p_bs = b.p_cir + p_tx / c.kappa;
    b.active_antennas = active;
    return b;
}

EeBreakdown bs_power(const arma::cx_mat &W, const QuantizationProfile &profile, const PowerModelConstants &c,
                     double P)
{
    return bs_power(active_set(W), profile, c, P * power_trace(profile, W));
}

EeBreakdown evaluate(const arma::cx_mat &H, const arma::cx_mat &W, const QuantizationProfile &profile,
                     double P, double sigma2, const PowerModelConstants &c)
{
    EeBreakdown b = bs_power(W, profile, c, P);
    b.sum_se = sum_se(H, W, profile, P, sigma2);
    b.ee = b.sum_se / b.p_bs;
    return b;
}

} // namespace qmimo
