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
#include "qmimo/ee_optimizer.hpp"
#include "qmimo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qmimo
{

namespace
{
constexpr int max_backtracks = 200;

void check_direction(const arma::cx_mat &V, const arma::cx_mat &H)
{
    if (V.n_rows != H.n_rows || V.n_cols != H.n_cols)
        throw PreconditionError("direction and channel dimensions disagree");
}

std::string coords(int outer, int middle)
{
    return "outer=" + std::to_string(outer) + " middle=" + std::to_string(middle);
}

// Rethrows a solver failure with the enclosing loop coordinates prepended.
[[noreturn]] void rethrow_at(const SolverError &e, int outer, int middle)
{
    std::string where = coords(outer, middle);
    if (!e.where().empty())
        where += " " + e.where();
    throw SolverError("Q-GPI-EEM diverged", where, e.iteration());
}

bool all_finite(const arma::cx_mat &W)
{
    return W.is_finite();
}
} // namespace

void SolveSettings::validate() const
{
    if (t_max < 1 || t_max_gpi < 1 || t_max_final_gpi < 1)
        throw PreconditionError("SolveSettings: iteration caps must be at least 1");
    const double pos[] = {eps_gpi, eps0, eps1, eps2, eps_final_gpi, delta_gd_init, armijo_c, rho, tau_floor};
    for (double x : pos)
        if (!(x > 0.0))
            throw PreconditionError("SolveSettings: tolerances, step sizes and rho must be positive");
    if (!(eps_as > 0.0 && eps_as < 1.0))
        throw PreconditionError("SolveSettings: eps_as must lie in (0, 1)");
    if (!(tau_floor <= 1.0))
        throw PreconditionError("SolveSettings: tau_floor must not exceed 1");
    if (pin_mu && !(*pin_mu >= 0.0))
        throw PreconditionError("SolveSettings: pinned mu must be non-negative");
    if (pin_tau && !(*pin_tau >= tau_floor && *pin_tau <= 1.0))
        throw PreconditionError("SolveSettings: pinned tau must lie in [tau_floor, 1]");
}

// ---------- tau subproblem ----------

TauTerms tau_terms(const arma::cx_mat &V, const arma::cx_mat &H, const QuantizationProfile &profile, double P,
                   double sigma2)
{
    check_direction(V, H);
    if (!(P > 0.0) || !(sigma2 >= 0.0))
        throw PreconditionError("tau_terms: need P > 0 and sigma2 >= 0");

    const arma::cx_mat S = (arma::diagmat(arma::sqrt(profile.alpha_bs())) * H).t() * V; // S(k, l) = g_k^H v_l
    const arma::mat S2 = arma::square(arma::abs(S));
    const arma::vec row_power = arma::sum(arma::square(arma::abs(V)), 1);

    TauTerms t;
    t.xi = profile.alpha_ue() % S2.diag();
    t.psi = arma::sum(S2, 1) - t.xi + (arma::diagmat(profile.beta_bs()) * arma::square(arma::abs(H))).t() * row_power;
    t.noise_over_p = sigma2 / P;
    return t;
}

double sum_se_at_tau(const TauTerms &terms, double tau)
{
    double se = 0.0;
    for (arma::uword k = 0; k < terms.xi.n_elem; ++k)
    {
        const double num = tau * terms.xi[k];
        if (num == 0.0)
            continue;
        se += std::log2(1.0 + num / (tau * terms.psi[k] + terms.noise_over_p));
    }
    return se;
}

double tau_objective(const TauTerms &terms, double tau, double mu, double P, double kappa)
{
    return sum_se_at_tau(terms, tau) - mu * P * tau / kappa;
}

double tau_gradient(const TauTerms &terms, double tau, double mu, double P, double kappa)
{
    const double s = terms.noise_over_p;
    double g = 0.0;
    for (arma::uword k = 0; k < terms.xi.n_elem; ++k)
    {
        const double total = terms.xi[k] + terms.psi[k];
        if (total > 0.0)
            g += total / (s + total * tau);
        if (terms.psi[k] > 0.0)
            g -= terms.psi[k] / (s + terms.psi[k] * tau);
    }
    return g / std::numbers::ln2 - mu * P / kappa;
}

double tau_gradient(const arma::cx_mat &V, double tau, double mu, const arma::cx_mat &H,
                    const QuantizationProfile &profile, double P, double sigma2, double kappa)
{
    return tau_gradient(tau_terms(V, H, profile, P, sigma2), tau, mu, P, kappa);
}

TauResult optimize_tau(const TauTerms &terms, double mu, double P, double kappa, const SolveSettings &settings,
                       double tau_init)
{
    auto clamp = [&](double t) { return std::clamp(t, settings.tau_floor, 1.0); };
    auto f = [&](double t) { return tau_objective(terms, t, mu, P, kappa); };

    TauResult r;
    r.tau = clamp(tau_init);
    double f_cur = f(r.tau);
    for (int t = 1; t <= settings.t_max; ++t)
    {
        r.iterations = t;
        const double grad = tau_gradient(terms, r.tau, mu, P, kappa);
        if (!std::isfinite(grad))
            throw SolverError("non-finite tau gradient", "tau=" + std::to_string(t), t);

        double delta = settings.delta_gd_init;
        double next = r.tau, f_next = f_cur;
        for (int b = 0; b < max_backtracks; ++b, delta *= 0.5)
        {
            const double cand = clamp(r.tau + delta * grad);
            const double f_cand = f(cand);
            if (f_cand >= f_cur + settings.armijo_c * grad * (cand - r.tau))
            {
                next = cand;
                f_next = f_cand;
                // The first trial was accepted: keep doubling while it pays off,
                // since delta_gd_init = 1 is small when the gradient is.
                if (b == 0)
                    for (int e = 0; e < max_backtracks && next > settings.tau_floor && next < 1.0; ++e)
                    {
                        delta *= 2.0;
                        const double wide = clamp(r.tau + delta * grad);
                        const double f_wide = f(wide);
                        if (!(f_wide > f_next) || f_wide < f_cur + settings.armijo_c * grad * (wide - r.tau))
                            break;
                        next = wide;
                        f_next = f_wide;
                    }
                break;
            }
        }
        const double prev = r.tau;
        r.tau = next;
        f_cur = f_next;
        if (std::abs(r.tau - prev) <= settings.eps2 * std::abs(r.tau))
            break;
    }
    return r;
}

// ---------- Dinkelbach ----------

double smoothed_indicator(double x, double rho)
{
    if (!(rho > 0.0) || !(x >= 0.0))
        throw PreconditionError("smoothed_indicator: need rho > 0 and x >= 0");
    return std::log2(1.0 + x / rho) / std::log2(1.0 + 1.0 / rho);
}

double dinkelbach_ratio(double sum_se, const arma::vec &indicator, const arma::vec &p_ant, double tau, double P,
                        const PowerModelConstants &constants)
{
    const double denom = constants.p_lo + arma::dot(indicator, p_ant) + tau * P / constants.kappa;
    return sum_se / denom;
}

double dinkelbach_update(const arma::cx_mat &V, double tau, const arma::cx_mat &H,
                         const QuantizationProfile &profile, double P, double sigma2,
                         const PowerModelConstants &constants, double rho)
{
    const TauTerms terms = tau_terms(V, H, profile, P, sigma2);
    const arma::vec x = arma::sum(arma::square(arma::abs(V)), 1) / profile.alpha_bs();
    arma::vec ind(x.n_elem), p_ant(x.n_elem);
    for (arma::uword n = 0; n < x.n_elem; ++n)
    {
        ind[n] = smoothed_indicator(x[n], rho);
        p_ant[n] = antenna_power(profile.dac_bits()[n], constants);
    }
    return dinkelbach_ratio(sum_se_at_tau(terms, tau), ind, p_ant, tau, P, constants);
}

// ---------- precoder assembly ----------

arma::cx_mat precoder_from_direction(const arma::cx_vec &v, double tau, const QuantizationProfile &profile)
{
    const arma::uword N = profile.n_antennas();
    return std::sqrt(tau) * (arma::diagmat(1.0 / arma::sqrt(profile.alpha_bs())) * as_matrix(v, N));
}

std::vector<arma::uword> select_antennas(arma::cx_mat &W, double eps_as)
{
    if (!(eps_as > 0.0 && eps_as < 1.0))
        throw PreconditionError("select_antennas: eps_as must lie in (0, 1)");
    const arma::vec r = arma::sum(arma::square(arma::abs(W)), 1);
    const double peak = r.max();
    std::vector<arma::uword> active;
    for (arma::uword n = 0; n < W.n_rows; ++n)
    {
        if (peak > 0.0 && r[n] >= eps_as * peak)
            active.push_back(n);
        else
            W.row(n).zeros();
    }
    return active;
}

namespace
{
void finish(SolveReport &rep, const arma::cx_mat &H, const QuantizationProfile &profile, double P, double sigma2,
            const PowerModelConstants &constants)
{
    rep.breakdown = evaluate(H, rep.W, profile, P, sigma2, constants);
    rep.active_set = rep.breakdown.active_antennas;
    rep.per_user_se = user_se(H, rep.W, profile, P, sigma2);
}

arma::cx_vec initial_direction(const arma::cx_mat &H, const QuantizationProfile &profile,
                               const std::optional<arma::cx_vec> &v0)
{
    if (H.n_rows != profile.n_antennas() || H.n_cols != profile.n_users())
        throw PreconditionError("channel dimensions do not match the quantization profile");
    return v0 ? *v0 : mrt_direction(H, profile);
}
} // namespace

// ---------- Q-GPI-EEM ----------

SolveReport qgpi_eem(const arma::cx_mat &H, const QuantizationProfile &profile, double P, double sigma2,
                     const PowerModelConstants &constants, const SolveSettings &settings,
                     std::optional<arma::cx_vec> v0)
{
    settings.validate();
    constants.validate();
    const arma::uword N = profile.n_antennas();

    SolveReport rep;
    arma::cx_vec v = initial_direction(H, profile, v0);
    double tau = settings.pin_tau.value_or(1.0);
    double mu = settings.pin_mu ? *settings.pin_mu
                                : dinkelbach_update(as_matrix(v, N), tau, H, profile, P, sigma2, constants,
                                                    settings.rho);
    rep.mu_trajectory.push_back(mu);
    arma::cx_mat W = precoder_from_direction(v, tau, profile);

    // True once a Q-GPI-DO call has met eps_final_gpi for the current (tau, mu):
    // further calls would only repeat a converged fixed point. `spent` counts the
    // GPI iterations at the current (tau, mu); the final tight solve gets the
    // rest of t_max_final_gpi.
    bool polished = false;
    int spent = 0;
    int outer = 0, middle = 0;
    try
    {
        for (outer = 1; outer <= settings.t_max; ++outer)
        {
            rep.loops.outer = outer;
            for (middle = 1; middle <= settings.t_max; ++middle)
            {
                ++rep.loops.middle;
                if (!settings.pin_tau)
                {
                    const TauResult tr =
                        optimize_tau(tau_terms(as_matrix(v, N), H, profile, P, sigma2), mu, P, constants.kappa,
                                     settings, tau);
                    rep.loops.inner += tr.iterations;
                    if (tr.tau != tau)
                    {
                        polished = false;
                        spent = 0;
                    }
                    tau = tr.tau;
                }
                if (!polished && spent < settings.t_max_final_gpi)
                {
                    const auto Q = QuotientMatrices::build(H, profile, P, sigma2, tau, settings.rho, constants);
                    const GpiResult g = qgpi_do(Q, mu, v, settings.eps_gpi,
                                                std::min(settings.t_max_gpi, settings.t_max_final_gpi - spent));
                    rep.loops.gpi += g.iterations;
                    spent += g.iterations;
                    v = g.v;
                    polished = g.last_step <= settings.eps_final_gpi;
                }
                arma::cx_mat W_new = precoder_from_direction(v, tau, profile);
                if (!all_finite(W_new))
                    throw SolverError("non-finite precoder", "");
                const double change = arma::norm(W_new - W, "fro") / arma::norm(W_new, "fro");
                W = std::move(W_new);
                if (change <= settings.eps1 || polished)
                    break;
            }

            if (settings.pin_mu)
            {
                rep.converged = true;
                break;
            }
            const double mu_new =
                dinkelbach_update(as_matrix(v, N), tau, H, profile, P, sigma2, constants, settings.rho);
            if (!std::isfinite(mu_new))
                throw SolverError("non-finite Dinkelbach parameter", "");
            rep.mu_trajectory.push_back(mu_new);
            const double rel = std::abs(mu_new - mu) / std::abs(mu_new);
            if (mu_new != mu)
            {
                polished = false;
                spent = 0;
            }
            mu = mu_new;
            if (rel <= settings.eps0)
            {
                rep.converged = true;
                break;
            }
        }
        rep.loops.outer = std::min(outer, settings.t_max);

        if (!polished && spent < settings.t_max_final_gpi)
        {
            const auto Q = QuotientMatrices::build(H, profile, P, sigma2, tau, settings.rho, constants);
            const GpiResult g = qgpi_do(Q, mu, v, settings.eps_final_gpi, settings.t_max_final_gpi - spent);
            rep.loops.gpi += g.iterations;
            v = g.v;
            W = precoder_from_direction(v, tau, profile);
            if (!all_finite(W))
                throw SolverError("non-finite precoder", "final");
        }
    }
    catch (const SolverError &e)
    {
        rethrow_at(e, outer, middle);
    }

    rep.direction = v;
    rep.tau = tau;
    // With mu = 0 there is no circuit-power incentive and selection is skipped.
    if (mu > 0.0)
        select_antennas(W, settings.eps_as);
    rep.W = std::move(W);
    finish(rep, H, profile, P, sigma2, constants);
    return rep;
}

// ---------- Q-GPI-SEM ----------

SolveReport qgpi_sem(const arma::cx_mat &H, const QuantizationProfile &profile, double P, double sigma2,
                     const PowerModelConstants &constants, const SolveSettings &settings,
                     std::optional<arma::cx_vec> v0)
{
    settings.validate();
    constants.validate();

    SolveReport rep;
    const arma::cx_vec v = initial_direction(H, profile, v0);
    const auto Q = QuotientMatrices::build(H, profile, P, sigma2, 1.0, settings.rho, constants);
    GpiResult g;
    try
    {
        g = qgpi_do(Q, 0.0, v, settings.eps_final_gpi, settings.t_max_final_gpi);
    }
    catch (const SolverError &e)
    {
        throw SolverError("Q-GPI-SEM diverged", e.where(), e.iteration());
    }
    rep.direction = g.v;
    rep.tau = 1.0;
    rep.mu_trajectory = {0.0};
    rep.converged = g.converged;
    rep.loops = {1, 1, 0, g.iterations};
    rep.W = precoder_from_direction(g.v, 1.0, profile);
    finish(rep, H, profile, P, sigma2, constants);
    return rep;
}

} // namespace qmimo
