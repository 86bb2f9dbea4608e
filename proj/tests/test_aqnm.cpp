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
#include "qmimo/aqnm.hpp"
#include "qmimo/errors.hpp"

#include <catch_amalgamated.hpp>

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace qmimo;

TEST_CASE("closed-form loss above five bits")
{
    const QuantLoss q = quant_loss(6);
    const double beta = std::numbers::pi * std::sqrt(3.0) / 2.0 * std::pow(2.0, -12.0);
    CHECK_THAT(q.beta, WithinRel(beta, 1e-14));
    CHECK_THAT(q.beta, WithinRel(6.6423e-4, 1e-4));
    CHECK_THAT(q.alpha, WithinAbs(0.9993358, 1e-7));

    const QuantLoss hi = quant_loss(30);
    CHECK(hi.beta < 1e-15);
    CHECK_THAT(hi.alpha, WithinAbs(1.0, 1e-15));
}

TEST_CASE("table values agree with a numeric Lloyd-Max design")
{
    for (unsigned b = 1; b <= 5; ++b)
    {
        const double mse = oracle::lloyd_max_mse(1 << b);
        INFO("bits = " << b << ", oracle = " << mse);
        CHECK_THAT(quant_loss(b).beta, WithinAbs(mse, 1e-3));
        CHECK_THAT(quant_loss(b).beta, WithinRel(mse, 5e-3));
    }
    CHECK_THAT(quant_loss(1).beta, WithinAbs(1.0 - 2.0 / std::numbers::pi, 1e-4));
}

TEST_CASE("loss is monotone in the bit width")
{
    for (unsigned b = 1; b < 32; ++b)
    {
        CHECK(quant_loss(b + 1).beta < quant_loss(b).beta);
        CHECK(quant_loss(b + 1).alpha >= quant_loss(b).alpha); // alpha rounds to 1 past ~27 bits
        CHECK_THAT(quant_loss(b).alpha + quant_loss(b).beta, WithinAbs(1.0, 1e-15));
    }
    CHECK_THROWS_AS(quant_loss(0), std::invalid_argument);
}

TEST_CASE("profiles carry per-antenna and per-user losses")
{
    const auto p = QuantizationProfile::from_bits({1, 3, 12}, {2, 6});
    REQUIRE(p.n_antennas() == 3);
    REQUIRE(p.n_users() == 2);
    CHECK(p.alpha_bs()[1] == quant_loss(3).alpha);
    CHECK(p.beta_ue()[1] == quant_loss(6).beta);

    const auto u = p.unquantized();
    CHECK(arma::all(u.alpha_bs() == 1.0));
    CHECK(arma::all(u.beta_ue() == 0.0));
    CHECK(u.dac_bits() == p.dac_bits());
    CHECK_THROWS_AS(QuantizationProfile::from_bits({}, {1}), std::invalid_argument);
}

TEST_CASE("DAC noise covariance")
{
    SECTION("perfect DACs give no noise")
    {
        const auto p = QuantizationProfile::uniform(4, 8, 2, 8).unquantized();
        const arma::cx_mat W = fixture::random_precoder(p, 2, 3);
        CHECK(arma::accu(arma::abs(dac_noise_covariance(p, W, 2.0))) == 0.0);
    }
    SECTION("single entry by hand")
    {
        const auto p = QuantizationProfile::uniform(1, 1, 1, 1);
        const arma::cx_mat W(1, 1, arma::fill::ones);
        // alpha * beta * P * |w|^2 with beta = 0.3634
        CHECK_THAT(dac_noise_covariance(p, W, 1.0)(0, 0), WithinRel(0.6366 * 0.3634, 1e-12));
    }
    SECTION("random instance against an element-wise loop")
    {
        const auto in = fixture::random_instance(4, 2, 11);
        const arma::cx_mat W = fixture::random_precoder(in.profile, 2, 12);
        const arma::mat R = dac_noise_covariance(in.profile, W, in.P);
        const oracle::Losses q(in.profile);
        for (arma::uword i = 0; i < 4; ++i)
            for (arma::uword j = 0; j < 4; ++j)
            {
                double expect = 0.0;
                if (i == j)
                    expect = q.a_bs[i] * q.b_bs[i] * in.P * (std::norm(W(i, 0)) + std::norm(W(i, 1)));
                CHECK_THAT(R(i, j), WithinAbs(expect, 1e-12 * std::max(1.0, in.P)));
                CHECK(R(i, j) >= 0.0);
            }
    }
    SECTION("dimension mismatch is rejected")
    {
        const auto p = QuantizationProfile::uniform(4, 3, 2, 3);
        CHECK_THROWS_AS(dac_noise_covariance(p, arma::cx_mat(3, 2, arma::fill::ones), 1.0), PreconditionError);
    }
}

TEST_CASE("ADC noise variance")
{
    const auto in = fixture::random_instance(4, 2, 21);
    const arma::cx_mat W = fixture::random_precoder(in.profile, 2, 22);

    SECTION("perfect ADCs")
    {
        auto p = QuantizationProfile::from_bits(in.profile.dac_bits(), {40, 40});
        CHECK(adc_noise_variance(p, in.H, W, in.P, in.sigma2, 0) < 1e-20);
    }
    SECTION("no signal leaves the thermal part")
    {
        const arma::cx_mat Z(4, 2, arma::fill::zeros);
        const double ab = in.profile.alpha_ue()[1] * in.profile.beta_ue()[1];
        CHECK_THAT(adc_noise_variance(in.profile, in.H, Z, in.P, 0.7, 1), WithinRel(ab * 0.7, 1e-14));
    }
    SECTION("covariance form equals the per-stream form")
    {
        for (std::uint64_t s = 0; s < 100; ++s)
        {
            const auto r = fixture::random_instance(4, 2, 100 + s);
            const arma::cx_mat Wr = fixture::random_precoder(r.profile, 2, 200 + s);
            const oracle::Losses q(r.profile);
            for (arma::uword k = 0; k < 2; ++k)
            {
                const double lib = adc_noise_variance(r.profile, r.H, Wr, r.P, r.sigma2, k);
                CHECK(lib >= 0.0);
                CHECK_THAT(lib, WithinRel(oracle::rqq_covariance_form(r.H, Wr, q, r.P, r.sigma2, k), 1e-10));
                CHECK_THAT(lib, WithinRel(oracle::rqq_stream_form(r.H, Wr, q, r.P, r.sigma2, k), 1e-10));
            }
        }
    }
}

TEST_CASE("transmit power identity tr E[x x^H] = P tr(Phi_a W W^H)")
{
    for (std::uint64_t s = 0; s < 20; ++s)
    {
        const auto in = fixture::random_instance(6, 3, 300 + s);
        const arma::cx_mat W = fixture::random_precoder(in.profile, 3, 400 + s, 0.6);
        const double full = std::real(arma::trace(transmit_covariance(in.profile, W, in.P)));
        CHECK_THAT(full, WithinRel(in.P * 0.6, 1e-12));
    }
}
