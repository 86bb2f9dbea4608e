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
#include "qmimo/aqnm.hpp"
#include "qmimo/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmimo
{

QuantLoss quant_loss(unsigned bits)
{
    if (bits == 0)
        throw std::invalid_argument("quant_loss: bit width must be at least 1");

    double beta;
    if (bits <= 5)
        beta = lloyd_max_beta[bits - 1];
    else
        beta = std::numbers::pi * std::sqrt(3.0) / 2.0 * std::exp2(-2.0 * double(bits));
    return {1.0 - beta, beta};
}

static void fill_losses(const std::vector<unsigned> &bits, arma::vec &alpha, arma::vec &beta)
{
    alpha.set_size(bits.size());
    beta.set_size(bits.size());
    for (size_t i = 0; i < bits.size(); ++i)
    {
        auto q = quant_loss(bits[i]);
        alpha[i] = q.alpha;
        beta[i] = q.beta;
    }
}

QuantizationProfile QuantizationProfile::from_bits(std::vector<unsigned> dac_bits, std::vector<unsigned> adc_bits)
{
    if (dac_bits.empty() || adc_bits.empty())
        throw std::invalid_argument("QuantizationProfile: need at least one antenna and one user");

    QuantizationProfile p;
    fill_losses(dac_bits, p.alpha_bs_, p.beta_bs_);
    fill_losses(adc_bits, p.alpha_ue_, p.beta_ue_);
    p.dac_bits_ = std::move(dac_bits);
    p.adc_bits_ = std::move(adc_bits);
    return p;
}

QuantizationProfile QuantizationProfile::uniform(arma::uword n_antennas, unsigned dac_bits,
                                                 arma::uword n_users, unsigned adc_bits)
{
    return from_bits(std::vector<unsigned>(n_antennas, dac_bits), std::vector<unsigned>(n_users, adc_bits));
}

QuantizationProfile QuantizationProfile::unquantized() const
{
    QuantizationProfile p = *this;
    p.alpha_bs_.ones();
    p.beta_bs_.zeros();
    p.alpha_ue_.ones();
    p.beta_ue_.zeros();
    return p;
}

arma::mat dac_noise_covariance(const QuantizationProfile &profile, const arma::cx_mat &W, double P)
{
    if (W.n_rows != profile.n_antennas())
        throw PreconditionError("dac_noise_covariance: W has " + std::to_string(W.n_rows) +
                                " rows, profile has " + std::to_string(profile.n_antennas()) + " antennas");
    if (!(P > 0.0))
        throw PreconditionError("dac_noise_covariance: transmit power must be positive");

    arma::vec row_power = arma::sum(arma::square(arma::abs(W)), 1);
    return arma::diagmat(profile.alpha_bs() % profile.beta_bs() % row_power * P);
}

arma::cx_mat transmit_covariance(const QuantizationProfile &profile, const arma::cx_mat &W, double P)
{
    const arma::mat Rq = dac_noise_covariance(profile, W, P);
    const arma::cx_mat AW = arma::diagmat(profile.alpha_bs()) * W;
    return P * AW * AW.t() + arma::conv_to<arma::cx_mat>::from(Rq);
}

double adc_noise_variance(const QuantizationProfile &profile, const arma::cx_mat &H, const arma::cx_mat &W,
                          double P, double sigma2, arma::uword k)
{
    if (H.n_rows != W.n_rows || H.n_cols != W.n_cols || H.n_cols != profile.n_users())
        throw PreconditionError("adc_noise_variance: H, W and profile dimensions disagree");
    if (k >= H.n_cols)
        throw PreconditionError("adc_noise_variance: user index out of range");

    const arma::mat Rq = dac_noise_covariance(profile, W, P);
    const arma::cx_vec h = H.col(k);

    // h^H Phi_a W: received (noise-free) amplitudes of all streams at user k
    arma::cx_rowvec s = h.t() * arma::diagmat(profile.alpha_bs()) * W;
    double signal = P * arma::accu(arma::square(arma::abs(s)));
    double dac_noise = arma::accu(arma::square(arma::abs(h)) % Rq.diag());

    const double ak = profile.alpha_ue()[k], bk = profile.beta_ue()[k];
    return ak * bk * (signal + dac_noise + sigma2);
}

} // namespace qmimo
