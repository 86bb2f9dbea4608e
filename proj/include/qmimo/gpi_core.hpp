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
#ifndef qmimo_gpi_core_H
#define qmimo_gpi_core_H

#include "qmimo/aqnm.hpp"
#include "qmimo/metrics.hpp"

#include <armadillo>
#include <cstdint>
#include <vector>

namespace qmimo
{

// Stacked directions v = vec(V) are column-major: entry n + N*k is row n
// (antenna) of column k (user).
inline arma::cx_mat as_matrix(const arma::cx_vec &v, arma::uword n_antennas)
{
    return arma::reshape(v, n_antennas, v.n_elem / n_antennas);
}

// Hermitian block-diagonal matrix made of n_blocks blocks of equal size.
class BlockDiagonal
{
public:
    BlockDiagonal() = default;
    BlockDiagonal(arma::uword n_blocks, arma::uword block_size); // zero blocks
    explicit BlockDiagonal(std::vector<arma::cx_mat> blocks);

    arma::uword n_blocks() const { return blocks_.size(); }
    arma::uword block_size() const { return block_size_; }
    arma::cx_mat &block(arma::uword i) { return blocks_[i]; }
    const arma::cx_mat &block(arma::uword i) const { return blocks_[i]; }

    arma::cx_vec apply(const arma::cx_vec &v) const;
    double quad(const arma::cx_vec &v) const; // Re(v^H M v)
    arma::cx_mat dense() const;

private:
    std::vector<arma::cx_mat> blocks_;
    arma::uword block_size_ = 0;
};

// Quadratic forms v^H A_k v, v^H B_k v (k = 0..K-1) and v^H E_n v (n = 0..N-1).
struct QuadForms
{
    arma::vec a, b, e;
};

// Rayleigh-quotient data of the direction subproblem for fixed tau:
//   A_k = blkdiag(G_k, ..., G_k) + sigma2/(tau P) I
//   B_k = A_k - alpha_k g_k g_k^H in block k,   g_k = Phi_a^{1/2} h_k
//   E_n = I + rho^{-1} I_K (x) alpha_n^{-1} e_n e_n^T
// with G_k = g_k g_k^H + Phi_b diag(|h_k|^2). Everything is stored through
// its N x N building blocks; the NK x NK matrices are only formed on request.
class QuotientMatrices
{
public:
    static QuotientMatrices build(const arma::cx_mat &H, const QuantizationProfile &profile, double P,
                                  double sigma2, double tau, double rho, const PowerModelConstants &constants);

    arma::uword n_antennas() const { return g_.n_rows; }
    arma::uword n_users() const { return g_.n_cols; }

    const arma::cx_mat &effective_channels() const { return g_; } // columns g_k
    arma::cx_mat gram(arma::uword k) const;                         // G_k
    double noise_loading() const { return loading_; }               // sigma2 / (tau P)
    double rho() const { return rho_; }
    double omega_rho() const { return omega_; }                     // 1 / log2(1 + 1/rho)
    const arma::vec &p_ant() const { return p_ant_; }
    const arma::vec &alpha_bs() const { return alpha_bs_; }
    const arma::vec &alpha_ue() const { return alpha_ue_; }
    const arma::mat &dac_weights() const { return dac_w_; }          // beta_n |h_nk|^2

    QuadForms quad_forms(const arma::cx_vec &v) const;

    BlockDiagonal a_matrix(arma::uword k) const;
    BlockDiagonal b_matrix(arma::uword k) const;
    BlockDiagonal e_matrix(arma::uword n) const;

private:
    arma::cx_mat g_;
    arma::mat dac_w_;
    arma::vec alpha_bs_, alpha_ue_, p_ant_;
    double loading_ = 0.0, rho_ = 0.0, omega_ = 0.0;
};

// Scale-reduced first-order pair. A stationary direction satisfies
// a_eff v = b_eff v; the positive scalar products that turn these into the
// textbook KKT matrices cancel under normalization and are omitted.
struct KktPair
{
    BlockDiagonal a_eff, b_eff;
};

KktPair build_kkt_matrices(const QuotientMatrices &Q, const arma::cx_vec &v, double mu);

// sum_k log2(v^H A_k v / v^H B_k v) - mu omega sum_n P_ant,n log2(v^H E_n v).
double objective_value(const QuotientMatrices &Q, const arma::cx_vec &v, double mu);

// Solves B x = y block by block (Cholesky, eigen fallback with floor 1e-12).
arma::cx_vec block_solve(const BlockDiagonal &B, const arma::cx_vec &y);

// sin of the angle between v and B_eff(v)^{-1} A_eff(v) v.
double stationarity_residual(const QuotientMatrices &Q, const arma::cx_vec &v, double mu);

struct GpiResult
{
    arma::cx_vec v;
    int iterations = 0;
    double residual = 0.0;   // stationarity_residual at v
    double last_step = 0.0;  // ||v^(t) - v^(t-1)|| of the final iteration
    bool converged = false;  // last_step <= eps
};

// Generalized power iteration v <- normalize(B_eff(v)^{-1} A_eff(v) v) until
// the step falls to eps or t_max iterations are spent. Throws SolverError on a
// non-finite iterate.
GpiResult qgpi_do(const QuotientMatrices &Q, double mu, const arma::cx_vec &v0, double eps, int t_max);

// vec(Phi_a^{1/2} H) / ||.||, the quantization-aware MRT warm start.
arma::cx_vec mrt_direction(const arma::cx_mat &H, const QuantizationProfile &profile);
// Uniform on the unit sphere of C^dim.
arma::cx_vec random_direction(arma::uword dim, std::uint64_t seed);

} // namespace qmimo

#endif
