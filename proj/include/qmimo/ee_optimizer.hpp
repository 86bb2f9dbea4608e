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
#ifndef qmimo_ee_optimizer_H
#define qmimo_ee_optimizer_H

#include "qmimo/aqnm.hpp"
#include "qmimo/gpi_core.hpp"
#include "qmimo/metrics.hpp"

#include <armadillo>
#include <optional>
#include <vector>

namespace qmimo
{

struct SolveSettings
{
    int t_max = 10;               // cap of the mu, W and tau loops
    int t_max_gpi = 10;           // cap of each Q-GPI-DO call inside the W loop
    int t_max_final_gpi = 1000;   // GPI budget of the final (tau, mu) and of Q-GPI-SEM
    double eps_gpi = 0.1;         // Q-GPI-DO tolerance inside the W loop
    double eps0 = 1e-3;           // relative change of mu
    double eps1 = 0.1;            // relative Frobenius change of W
    double eps2 = 0.1;            // relative change of tau
    double eps_final_gpi = 1e-8;  // final direction solve
    double eps_as = 0.05;         // antenna selection threshold, in (0, 1)
    double delta_gd_init = 1.0;   // initial step of the tau line search
    double armijo_c = 1e-4;       // sufficient-increase constant
    double rho = 1e-4;            // smoothing of the active-antenna indicator
    double tau_floor = 1e-6;      // lower clamp of tau

    // Hold mu or tau fixed instead of optimizing them. mu pinned to 0 and tau
    // to 1 reduces Q-GPI-EEM to Q-GPI-SEM.
    std::optional<double> pin_mu;
    std::optional<double> pin_tau;

    void validate() const;
};

// Per-user constants of the scalar power problem for a fixed direction V:
// Xi_k = alpha_k |g_k^H v_k|^2, Psi_k = interference + DAC noise quadratic form.
struct TauTerms
{
    arma::vec xi, psi;
    double noise_over_p = 0.0;  // sigma2 / P
};

TauTerms tau_terms(const arma::cx_mat &V, const arma::cx_mat &H, const QuantizationProfile &profile, double P,
                   double sigma2);

// sum_k log2(1 + tau Xi_k / (tau Psi_k + sigma2/P)), i.e. the sum SE at power fraction tau.
double sum_se_at_tau(const TauTerms &terms, double tau);
// sum_se_at_tau - mu P tau / kappa
double tau_objective(const TauTerms &terms, double tau, double mu, double P, double kappa);
double tau_gradient(const TauTerms &terms, double tau, double mu, double P, double kappa);
double tau_gradient(const arma::cx_mat &V, double tau, double mu, const arma::cx_mat &H,
                    const QuantizationProfile &profile, double P, double sigma2, double kappa);

struct TauResult
{
    double tau = 1.0;
    int iterations = 0;
};

// Projected gradient ascent with Armijo backtracking, clamped to [tau_floor, 1].
TauResult optimize_tau(const TauTerms &terms, double mu, double P, double kappa, const SolveSettings &settings,
                       double tau_init = 1.0);

// log2(1 + x/rho) / log2(1 + 1/rho): smooth surrogate of 1{x > 0}.
double smoothed_indicator(double x, double rho);

// sum_se / (P_LO + sum_m indicator_m P_ant,m + tau P / kappa)
double dinkelbach_ratio(double sum_se, const arma::vec &indicator, const arma::vec &p_ant, double tau, double P,
                        const PowerModelConstants &constants);

// Next Dinkelbach parameter for direction V (N x K, unit Frobenius norm) and tau,
// with the smoothed indicator evaluated at ||v_n / sqrt(alpha_n)||^2.
double dinkelbach_update(const arma::cx_mat &V, double tau, const arma::cx_mat &H,
                         const QuantizationProfile &profile, double P, double sigma2,
                         const PowerModelConstants &constants, double rho);

// W = sqrt(tau) Phi_a^{-1/2} V
arma::cx_mat precoder_from_direction(const arma::cx_vec &v, double tau, const QuantizationProfile &profile);

// Zeroes every row of W whose squared norm is below eps_as times the largest
// one (rows of V and W differ by sqrt(alpha_n / tau), so this is the
// normalized-row test on V). Returns the surviving antennas.
std::vector<arma::uword> select_antennas(arma::cx_mat &W, double eps_as);

struct LoopCounts
{
    int outer = 0;   // mu updates
    int middle = 0;  // W iterations, summed over outer
    int inner = 0;   // tau iterations, summed
    int gpi = 0;     // Q-GPI-DO iterations, summed
};

struct SolveReport
{
    arma::cx_mat W;
    arma::cx_vec direction;             // final v before antenna selection
    double tau = 1.0;
    std::vector<double> mu_trajectory;  // mu^(0), mu^(1), ...
    std::vector<arma::uword> active_set;
    arma::vec per_user_se;
    EeBreakdown breakdown;              // hard active-set indicator
    bool converged = false;             // mu loop met eps0 within t_max
    LoopCounts loops;
};

// Joint precoding, power scaling and antenna selection maximizing EE.
// v0 defaults to mrt_direction(H, profile). Throws SolverError with the loop
// coordinates if the state turns non-finite.
SolveReport qgpi_eem(const arma::cx_mat &H, const QuantizationProfile &profile, double P, double sigma2,
                     const PowerModelConstants &constants, const SolveSettings &settings,
                     std::optional<arma::cx_vec> v0 = std::nullopt);

// Sum-SE maximization: one Q-GPI-DO run at tau = 1, mu = 0 with eps_final_gpi.
SolveReport qgpi_sem(const arma::cx_mat &H, const QuantizationProfile &profile, double P, double sigma2,
                     const PowerModelConstants &constants, const SolveSettings &settings,
                     std::optional<arma::cx_vec> v0 = std::nullopt);

} // namespace qmimo

#endif
