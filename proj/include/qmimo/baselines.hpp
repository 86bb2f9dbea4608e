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
#ifndef qmimo_baselines_H
#define qmimo_baselines_H

#include "qmimo/aqnm.hpp"
#include "qmimo/ee_optimizer.hpp"
#include "qmimo/metrics.hpp"

#include <armadillo>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qmimo
{

enum class PrecoderKind
{
    MRT,
    ZF,
    RZF,
    Q_MRT,
    Q_ZF,
    Q_RZF,
    GPI_SEM,
    Q_GPI_SEM,
    Q_GPI_EEM
};

const std::vector<PrecoderKind> &all_precoder_kinds();
std::string to_string(PrecoderKind kind);
// Accepts the names produced by to_string ("Q-RZF", "Q-GPI-EEM", ...),
// case-insensitively, with '_' and '-' interchangeable.
std::optional<PrecoderKind> parse_precoder_kind(std::string_view name);

bool is_linear(PrecoderKind kind);

// Closed-form precoder scaled to tr(Phi_a W W^H) = 1. Conventional kinds are
// built from H, the Q- kinds from H_e = Phi_a H. RZF loading is K sigma2 / P.
// Throws PreconditionError when a ZF kind meets a rank-deficient channel.
arma::cx_mat linear_precoder(PrecoderKind kind, const arma::cx_mat &H, const QuantizationProfile &profile,
                             double P, double sigma2);

// Rescales W so that tr(Phi_a W W^H) = 1.
arma::cx_mat normalize_power(const arma::cx_mat &W, const QuantizationProfile &profile);

// Quantization-ignorant GPI-SEM: Q-GPI-SEM on the unquantized profile, scaled to
// the power constraint of the true profile and evaluated with it.
SolveReport gpi_sem(const arma::cx_mat &H, const QuantizationProfile &profile, double P, double sigma2,
                    const PowerModelConstants &constants, const SolveSettings &settings,
                    std::optional<arma::cx_vec> v0 = std::nullopt);

// Dispatches any kind. Linear kinds report tau = 1 and no loop counts.
SolveReport run_precoder(PrecoderKind kind, const arma::cx_mat &H, const QuantizationProfile &profile, double P,
                         double sigma2, const PowerModelConstants &constants, const SolveSettings &settings);

} // namespace qmimo

#endif
