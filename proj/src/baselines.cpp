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
#include "qmimo/baselines.hpp"
#include "qmimo/errors.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace qmimo
{

namespace
{
struct KindName
{
    PrecoderKind kind;
    const char *name;
};

constexpr KindName kind_names[] = {
    {PrecoderKind::MRT, "MRT"},         {PrecoderKind::ZF, "ZF"},
    {PrecoderKind::RZF, "RZF"},         {PrecoderKind::Q_MRT, "Q-MRT"},
    {PrecoderKind::Q_ZF, "Q-ZF"},       {PrecoderKind::Q_RZF, "Q-RZF"},
    {PrecoderKind::GPI_SEM, "GPI-SEM"}, {PrecoderKind::Q_GPI_SEM, "Q-GPI-SEM"},
    {PrecoderKind::Q_GPI_EEM, "Q-GPI-EEM"},
};

std::string canonical(std::string_view s)
{
    std::string out(s);
    for (char &c : out)
        c = c == '_' ? '-' : char(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

bool quantization_aware(PrecoderKind kind)
{
    return kind == PrecoderKind::Q_MRT || kind == PrecoderKind::Q_ZF || kind == PrecoderKind::Q_RZF;
}
} // namespace

const std::vector<PrecoderKind> &all_precoder_kinds()
{
    static const std::vector<PrecoderKind> kinds = [] {
        std::vector<PrecoderKind> v;
        for (const auto &kn : kind_names)
            v.push_back(kn.kind);
        return v;
    }();
    return kinds;
}

std::string to_string(PrecoderKind kind)
{
    for (const auto &kn : kind_names)
        if (kn.kind == kind)
            return kn.name;
    return "unknown";
}

std::optional<PrecoderKind> parse_precoder_kind(std::string_view name)
{
    const std::string c = canonical(name);
    for (const auto &kn : kind_names)
        if (c == kn.name)
            return kn.kind;
    return std::nullopt;
}

bool is_linear(PrecoderKind kind)
{
    return kind != PrecoderKind::GPI_SEM && kind != PrecoderKind::Q_GPI_SEM && kind != PrecoderKind::Q_GPI_EEM;
}

arma::cx_mat normalize_power(const arma::cx_mat &W, const QuantizationProfile &profile)
{
    const double t = power_trace(profile, W);
    if (!(t > 0.0) || !std::isfinite(t))
        throw PreconditionError("normalize_power: precoder has no usable power");
    return W / std::sqrt(t);
}

arma::cx_mat linear_precoder(PrecoderKind kind, const arma::cx_mat &H, const QuantizationProfile &profile,
                             double P, double sigma2)
{
    if (!is_linear(kind))
        throw PreconditionError("linear_precoder: " + to_string(kind) + " is not a closed-form precoder");
    if (H.n_rows != profile.n_antennas() || H.n_cols != profile.n_users())
        throw PreconditionError("linear_precoder: channel dimensions do not match the quantization profile");
    if (!(P > 0.0) || !(sigma2 >= 0.0))
        throw PreconditionError("linear_precoder: need P > 0 and sigma2 >= 0");

    const arma::cx_mat He = quantization_aware(kind) ? arma::cx_mat(arma::diagmat(profile.alpha_bs()) * H) : H;
    const arma::uword K = He.n_cols;

    arma::cx_mat W;
    switch (kind)
    {
    case PrecoderKind::MRT:
    case PrecoderKind::Q_MRT:
        W = He;
        break;
    case PrecoderKind::ZF:
    case PrecoderKind::Q_ZF:
    {
        const arma::uword r = arma::rank(He);
        if (r < K)
            throw PreconditionError("linear_precoder: zero-forcing needs full column rank, channel has rank " +
                                    std::to_string(r) + " < " + std::to_string(K) + " users");
        W = He * arma::inv_sympd(arma::cx_mat(He.t() * He));
        break;
    }
    default:
    {
        arma::cx_mat G = He.t() * He;
        G.diag() += double(K) * sigma2 / P;
        W = He * arma::inv_sympd(G);
        break;
    }
    }
    return normalize_power(W, profile);
}

SolveReport gpi_sem(const arma::cx_mat &H, const QuantizationProfile &profile, double P, double sigma2,
                    const PowerModelConstants &constants, const SolveSettings &settings,
                    std::optional<arma::cx_vec> v0)
{
    SolveReport rep = qgpi_sem(H, profile.unquantized(), P, sigma2, constants, settings, std::move(v0));
    rep.W = normalize_power(rep.W, profile);
    rep.breakdown = evaluate(H, rep.W, profile, P, sigma2, constants);
    rep.active_set = rep.breakdown.active_antennas;
    rep.per_user_se = user_se(H, rep.W, profile, P, sigma2);
    return rep;
}

SolveReport run_precoder(PrecoderKind kind, const arma::cx_mat &H, const QuantizationProfile &profile, double P,
                         double sigma2, const PowerModelConstants &constants, const SolveSettings &settings)
{
    switch (kind)
    {
    case PrecoderKind::GPI_SEM:
        return gpi_sem(H, profile, P, sigma2, constants, settings);
    case PrecoderKind::Q_GPI_SEM:
        return qgpi_sem(H, profile, P, sigma2, constants, settings);
    case PrecoderKind::Q_GPI_EEM:
        return qgpi_eem(H, profile, P, sigma2, constants, settings);
    default:
        break;
    }
    SolveReport rep;
    rep.W = linear_precoder(kind, H, profile, P, sigma2);
    rep.tau = 1.0;
    rep.converged = true;
    rep.breakdown = evaluate(H, rep.W, profile, P, sigma2, constants);
    rep.active_set = rep.breakdown.active_antennas;
    rep.per_user_se = user_se(H, rep.W, profile, P, sigma2);
    return rep;
}

} // namespace qmimo
