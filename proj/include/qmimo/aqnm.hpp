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
#ifndef qmimo_aqnm_H
#define qmimo_aqnm_H

#include <armadillo>
#include <vector>

namespace qmimo
{

// Quantizer gain alpha = 1 - beta and normalized MSE beta of a b-bit quantizer.
struct QuantLoss
{
    double alpha;
    double beta;
};

// Normalized mean-squared error of the MSE-optimal (Lloyd-Max) scalar quantizer
// for a unit-variance Gaussian input, b = 1..5.
inline constexpr double lloyd_max_beta[5] = {0.3634, 0.1175, 0.03454, 0.009497, 0.002499};

// beta from the Lloyd-Max table for bits <= 5, otherwise pi*sqrt(3)/2 * 2^(-2b).
// Throws std::invalid_argument for bits == 0.
QuantLoss quant_loss(unsigned bits);

// Per-antenna DAC and per-user ADC resolutions together with the derived
// AQNM loss factors. Profiles built from bit widths have every alpha, beta in
// (0,1); `unquantized()` gives the infinite-resolution limit (alpha = 1,
// beta = 0) while keeping the bit widths for power accounting.
class QuantizationProfile
{
public:
    QuantizationProfile() = default;

    static QuantizationProfile from_bits(std::vector<unsigned> dac_bits, std::vector<unsigned> adc_bits);
    static QuantizationProfile uniform(arma::uword n_antennas, unsigned dac_bits,
                                       arma::uword n_users, unsigned adc_bits);

    QuantizationProfile unquantized() const;

    arma::uword n_antennas() const { return alpha_bs_.n_elem; }
    arma::uword n_users() const { return alpha_ue_.n_elem; }

    const std::vector<unsigned> &dac_bits() const { return dac_bits_; }
    const std::vector<unsigned> &adc_bits() const { return adc_bits_; }
    const arma::vec &alpha_bs() const { return alpha_bs_; } // DAC loss, length N
    const arma::vec &beta_bs() const { return beta_bs_; }
    const arma::vec &alpha_ue() const { return alpha_ue_; } // ADC loss, length K
    const arma::vec &beta_ue() const { return beta_ue_; }

private:
    std::vector<unsigned> dac_bits_, adc_bits_;
    arma::vec alpha_bs_, beta_bs_, alpha_ue_, beta_ue_;
};

// Diagonal covariance of the DAC quantization noise,
// R = diag(alpha_n * beta_n * P * sum_l |w_nl|^2).
arma::mat dac_noise_covariance(const QuantizationProfile &profile, const arma::cx_mat &W, double P);

// E[x_q x_q^H] = P Phi_a W W^H Phi_a + R: covariance of the DAC output.
arma::cx_mat transmit_covariance(const QuantizationProfile &profile, const arma::cx_mat &W, double P);

// Variance of the ADC quantization noise of user k (0-based):
// alpha_k beta_k (h_k^H (P Phi_a W W^H Phi_a + R) h_k + sigma2).
double adc_noise_variance(const QuantizationProfile &profile, const arma::cx_mat &H, const arma::cx_mat &W,
                          double P, double sigma2, arma::uword k);

} // namespace qmimo

#endif
