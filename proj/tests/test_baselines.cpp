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
#include "fixtures.hpp"
#include "oracles.hpp"
#include "qmimo/baselines.hpp"
#include "qmimo/errors.hpp"

#include <catch_amalgamated.hpp>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace qmimo;

namespace
{
const PowerModelConstants consts;
const PrecoderKind linear_kinds[] = {PrecoderKind::MRT,   PrecoderKind::ZF,   PrecoderKind::RZF,
                                     PrecoderKind::Q_MRT, PrecoderKind::Q_ZF, PrecoderKind::Q_RZF};

arma::cx_vec col(const arma::cx_mat &W) { return arma::vectorise(W); }
} // namespace

TEST_CASE("precoder names round-trip")
{
    CHECK(all_precoder_kinds().size() == 9);
    for (PrecoderKind k : all_precoder_kinds())
        CHECK(parse_precoder_kind(to_string(k)) == k);
    CHECK(parse_precoder_kind("q_gpi_eem") == PrecoderKind::Q_GPI_EEM);
    CHECK(parse_precoder_kind("q-rzf") == PrecoderKind::Q_RZF);
    CHECK(parse_precoder_kind("Q_MRT") == PrecoderKind::Q_MRT);
    CHECK_FALSE(parse_precoder_kind("MMSE").has_value());
    CHECK(to_string(PrecoderKind::Q_GPI_SEM) == "Q-GPI-SEM");
    CHECK(is_linear(PrecoderKind::Q_ZF));
    CHECK_FALSE(is_linear(PrecoderKind::GPI_SEM));
}

TEST_CASE("single-user linear precoders coincide")
{
    const auto in = fixture::random_instance(6, 1, 1);
    const arma::cx_vec ref = col(linear_precoder(PrecoderKind::MRT, in.H, in.profile, in.P, in.sigma2));
    for (PrecoderKind k : {PrecoderKind::ZF, PrecoderKind::RZF})
    {
        const arma::cx_vec w = col(linear_precoder(k, in.H, in.profile, in.P, in.sigma2));
        CHECK_THAT(std::abs(arma::cdot(ref, w)) / (arma::norm(ref) * arma::norm(w)), WithinAbs(1.0, 1e-12));
    }
    const arma::cx_vec qref = col(linear_precoder(PrecoderKind::Q_MRT, in.H, in.profile, in.P, in.sigma2));
    for (PrecoderKind k : {PrecoderKind::Q_ZF, PrecoderKind::Q_RZF})
    {
        const arma::cx_vec w = col(linear_precoder(k, in.H, in.profile, in.P, in.sigma2));
        CHECK_THAT(std::abs(arma::cdot(qref, w)) / (arma::norm(qref) * arma::norm(w)), WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("quantization-aware precoders reduce to the classical ones without loss")
{
    const auto in = fixture::random_instance(8, 3, 2);
    const auto ideal = in.profile.unquantized();
    const std::pair<PrecoderKind, PrecoderKind> pairs[] = {{PrecoderKind::Q_MRT, PrecoderKind::MRT},
                                                           {PrecoderKind::Q_ZF, PrecoderKind::ZF},
                                                           {PrecoderKind::Q_RZF, PrecoderKind::RZF}};
    for (auto [q, c] : pairs)
    {
        const arma::cx_mat a = linear_precoder(q, in.H, ideal, in.P, in.sigma2);
        const arma::cx_mat b = linear_precoder(c, in.H, ideal, in.P, in.sigma2);
        CHECK(arma::norm(a - b, "fro") <= 1e-12);
    }
}

TEST_CASE("Q-ZF nulls inter-user leakage on the effective channel")
{
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        const auto in = fixture::random_instance(8, 4, 10 + s);
        const arma::cx_mat W = linear_precoder(PrecoderKind::Q_ZF, in.H, in.profile, in.P, in.sigma2);
        const arma::cx_mat S = in.H.t() * arma::diagmat(in.profile.alpha_bs()) * W;
        const double scale = arma::abs(S.diag()).max();
        for (arma::uword k = 0; k < 4; ++k)
            for (arma::uword l = 0; l < 4; ++l)
                if (k != l)
                    CHECK(std::abs(S(k, l)) <= 1e-10 * scale);
    }
}

TEST_CASE("every precoder meets the power constraint")
{
    for (std::uint64_t s = 0; s < 5; ++s)
    {
        const auto in = fixture::cell_instance(8, 3, 20 + s, 20.0);
        for (PrecoderKind k : linear_kinds)
            CHECK_THAT(power_trace(in.profile, linear_precoder(k, in.H, in.profile, in.P, in.sigma2)),
                       WithinAbs(1.0, 1e-12));
        for (PrecoderKind k : all_precoder_kinds())
        {
            const auto r = run_precoder(k, in.H, in.profile, in.P, in.sigma2, consts, SolveSettings{});
            const double t = power_trace(in.profile, r.W);
            CHECK(t <= 1.0 + 1e-9);
            if (k != PrecoderKind::Q_GPI_EEM)
                CHECK_THAT(t, WithinAbs(1.0, 1e-9));
        }
    }
    const arma::cx_mat W = fixture::random_precoder(fixture::random_instance(4, 2, 3).profile, 2, 4, 5.0);
    CHECK_THAT(power_trace(fixture::random_instance(4, 2, 3).profile,
                           normalize_power(W, fixture::random_instance(4, 2, 3).profile)),
               WithinAbs(1.0, 1e-12));
}

TEST_CASE("zero-forcing rejects a rank-deficient channel")
{
    auto in = fixture::random_instance(6, 3, 30);
    in.H.col(2) = 2.0 * in.H.col(0);
    CHECK_THROWS_WITH(linear_precoder(PrecoderKind::ZF, in.H, in.profile, in.P, in.sigma2),
                      ContainsSubstring("rank"));
    CHECK_THROWS_AS(linear_precoder(PrecoderKind::Q_ZF, in.H, in.profile, in.P, in.sigma2), PreconditionError);
    const arma::cx_mat wide = fixture::random_instance(2, 3, 31).H;
    const auto p = QuantizationProfile::uniform(2, 4, 3, 4);
    CHECK_THROWS_WITH(linear_precoder(PrecoderKind::ZF, wide, p, 1.0, 1.0), ContainsSubstring("rank"));
    CHECK_NOTHROW(linear_precoder(PrecoderKind::RZF, in.H, in.profile, in.P, in.sigma2));
}

TEST_CASE("RZF limits in the power budget")
{
    const auto in = fixture::random_instance(8, 3, 40);
    const auto ideal = in.profile.unquantized();
    auto collinear = [](const arma::cx_mat &a, const arma::cx_mat &b) {
        return std::abs(arma::cdot(col(a), col(b))) / (arma::norm(col(a)) * arma::norm(col(b)));
    };
    double prev = 0.0;
    for (double P : {1e2, 1e4, 1e6, 1e8})
    {
        const double c = collinear(linear_precoder(PrecoderKind::Q_RZF, in.H, ideal, P, in.sigma2),
                                   linear_precoder(PrecoderKind::Q_ZF, in.H, ideal, P, in.sigma2));
        CHECK(c >= prev - 1e-12);
        prev = c;
    }
    CHECK_THAT(prev, WithinAbs(1.0, 1e-9));

    const double P = 1e-9;
    const arma::cx_mat r = linear_precoder(PrecoderKind::Q_RZF, in.H, in.profile, P, in.sigma2);
    const arma::cx_mat m = linear_precoder(PrecoderKind::Q_MRT, in.H, in.profile, P, in.sigma2);
    CHECK_THAT(collinear(r, m), WithinAbs(1.0, 1e-8));
    CHECK_THAT(sum_se(in.H, r, in.profile, P, in.sigma2),
               WithinRel(sum_se(in.H, m, in.profile, P, in.sigma2), 1e-6));
}

TEST_CASE("Q-GPI-SEM without quantization loss is GPI-SEM")
{
    const auto in = fixture::cell_instance(8, 3, 50, 20.0);
    const auto v0 = random_direction(24, 51);
    const auto a = qgpi_sem(in.H, in.profile.unquantized(), in.P, in.sigma2, consts, SolveSettings{}, v0);
    const auto b = gpi_sem(in.H, in.profile, in.P, in.sigma2, consts, SolveSettings{}, v0);
    CHECK(arma::approx_equal(a.direction, b.direction, "absdiff", 0.0));
    CHECK(a.loops.gpi == b.loops.gpi);
}

TEST_CASE("two-user Q-GPI-SEM beats the linear baselines and random search")
{
    for (std::uint64_t s = 0; s < 3; ++s)
    {
        const auto in = fixture::cell_instance(2, 2, 60 + s, 30.0);
        const auto r = qgpi_sem(in.H, in.profile, in.P, in.sigma2, consts, SolveSettings{});
        double best = 0.0;
        for (PrecoderKind k : {PrecoderKind::Q_MRT, PrecoderKind::Q_RZF})
            best = std::max(best, sum_se(in.H, linear_precoder(k, in.H, in.profile, in.P, in.sigma2), in.profile,
                                         in.P, in.sigma2));
        try
        {
            best = std::max(best, sum_se(in.H, linear_precoder(PrecoderKind::Q_ZF, in.H, in.profile, in.P, in.sigma2),
                                         in.profile, in.P, in.sigma2));
        }
        catch (const PreconditionError &)
        {
        }
        const arma::vec isqa = 1.0 / arma::sqrt(in.profile.alpha_bs());
        best = std::max(best, oracle::random_search_max(
                                  [&](const arma::cx_vec &v) {
                                      const arma::cx_mat W = arma::diagmat(isqa) * as_matrix(v, 2);
                                      return sum_se(in.H, W, in.profile, in.P, in.sigma2);
                                  },
                                  4, 100000, 70 + s));
        CHECK(r.breakdown.sum_se >= best - 1e-6);
    }
}
