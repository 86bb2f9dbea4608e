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
#include "qmimo/gpi_core.hpp"
#include "qmimo/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace qmimo
{

namespace
{
constexpr double unit_norm_tol = 1e-8;
constexpr double eigen_floor = 1e-12;

void check_unit(const arma::cx_vec &v, arma::uword dim, const char *who)
{
    if (v.n_elem != dim)
        throw PreconditionError(std::string(who) + ": direction has length " + std::to_string(v.n_elem) +
                                ", expected " + std::to_string(dim));
    const double n = arma::norm(v);
    if (!(std::abs(n - 1.0) <= unit_norm_tol))
        throw PreconditionError(std::string(who) + ": direction must have unit norm (got " + std::to_string(n) + ")");
}

// B^{-1} A v for the current KKT pair.
arma::cx_vec gpi_map(const QuotientMatrices &Q, const arma::cx_vec &v, double mu)
{
    const KktPair kkt = build_kkt_matrices(Q, v, mu);
    return block_solve(kkt.b_eff, kkt.a_eff.apply(v));
}
} // namespace

// ---------- BlockDiagonal ----------

BlockDiagonal::BlockDiagonal(arma::uword n_blocks, arma::uword block_size)
    : block_size_(block_size)
{
    blocks_.reserve(n_blocks);
    for (arma::uword i = 0; i < n_blocks; ++i)
        blocks_.emplace_back(block_size, block_size, arma::fill::zeros);
}

BlockDiagonal::BlockDiagonal(std::vector<arma::cx_mat> blocks) : blocks_(std::move(blocks))
{
    block_size_ = blocks_.empty() ? 0 : blocks_.front().n_rows;
    for (const auto &b : blocks_)
        if (b.n_rows != block_size_ || b.n_cols != block_size_)
            throw PreconditionError("BlockDiagonal: blocks must be square and of equal size");
}

arma::cx_vec BlockDiagonal::apply(const arma::cx_vec &v) const
{
    arma::cx_vec out(v.n_elem);
    const arma::uword n = block_size_;
    for (arma::uword i = 0; i < blocks_.size(); ++i)
        out.subvec(i * n, i * n + n - 1) = blocks_[i] * v.subvec(i * n, i * n + n - 1);
    return out;
}

double BlockDiagonal::quad(const arma::cx_vec &v) const
{
    return std::real(arma::cdot(v, apply(v)));
}

arma::cx_mat BlockDiagonal::dense() const
{
    const arma::uword n = block_size_;
    arma::cx_mat M(n * blocks_.size(), n * blocks_.size(), arma::fill::zeros);
    for (arma::uword i = 0; i < blocks_.size(); ++i)
        M.submat(i * n, i * n, i * n + n - 1, i * n + n - 1) = blocks_[i];
    return M;
}

// ---------- QuotientMatrices ----------

QuotientMatrices QuotientMatrices::build(const arma::cx_mat &H, const QuantizationProfile &profile, double P,
                                         double sigma2, double tau, double rho,
                                         const PowerModelConstants &constants)
{
    if (H.n_rows != profile.n_antennas() || H.n_cols != profile.n_users())
        throw PreconditionError("QuotientMatrices: channel dimensions do not match the quantization profile");
    if (!(tau > 0.0 && tau <= 1.0))
        throw PreconditionError("QuotientMatrices: tau must lie in (0, 1], got " + std::to_string(tau));
    if (!(rho > 0.0))
        throw PreconditionError("QuotientMatrices: rho must be positive");
    if (!(P > 0.0) || !(sigma2 >= 0.0))
        throw PreconditionError("QuotientMatrices: need P > 0 and sigma2 >= 0");

    QuotientMatrices Q;
    Q.g_ = arma::diagmat(arma::sqrt(profile.alpha_bs())) * H;
    Q.dac_w_ = arma::diagmat(profile.beta_bs()) * arma::square(arma::abs(H));
    Q.alpha_bs_ = profile.alpha_bs();
    Q.alpha_ue_ = profile.alpha_ue();
    Q.loading_ = sigma2 / (tau * P);
    Q.rho_ = rho;
    Q.omega_ = 1.0 / std::log2(1.0 + 1.0 / rho);
    Q.p_ant_.set_size(profile.n_antennas());
    for (arma::uword n = 0; n < profile.n_antennas(); ++n)
        Q.p_ant_[n] = antenna_power(profile.dac_bits()[n], constants);
    return Q;
}

arma::cx_mat QuotientMatrices::gram(arma::uword k) const
{
    arma::cx_mat G = g_.col(k) * g_.col(k).t();
    G.diag() += arma::conv_to<arma::cx_vec>::from(dac_w_.col(k));
    return G;
}

QuadForms QuotientMatrices::quad_forms(const arma::cx_vec &v) const
{
    const arma::uword N = n_antennas(), K = n_users();
    const arma::cx_mat V = as_matrix(v, N);
    const arma::cx_mat S = g_.t() * V;                       // S(k, l) = g_k^H v_l
    const arma::vec row_power = arma::sum(arma::square(arma::abs(V)), 1);
    const double vv = arma::accu(row_power);

    QuadForms f;
    f.a = arma::sum(arma::square(arma::abs(S)), 1) + dac_w_.t() * row_power + loading_ * vv;
    f.b = f.a;
    for (arma::uword k = 0; k < K; ++k)
        f.b[k] -= alpha_ue_[k] * std::norm(S(k, k));
    f.e = vv + row_power / (rho_ * alpha_bs_);
    return f;
}

BlockDiagonal QuotientMatrices::a_matrix(arma::uword k) const
{
    const arma::uword N = n_antennas(), K = n_users();
    BlockDiagonal A(K, N);
    arma::cx_mat blk = gram(k);
    blk.diag() += loading_;
    for (arma::uword l = 0; l < K; ++l)
        A.block(l) = blk;
    return A;
}

BlockDiagonal QuotientMatrices::b_matrix(arma::uword k) const
{
    BlockDiagonal B = a_matrix(k);
    B.block(k) -= alpha_ue_[k] * (g_.col(k) * g_.col(k).t());
    return B;
}

BlockDiagonal QuotientMatrices::e_matrix(arma::uword n) const
{
    const arma::uword N = n_antennas(), K = n_users();
    BlockDiagonal E(K, N);
    for (arma::uword l = 0; l < K; ++l)
    {
        E.block(l).eye();
        E.block(l)(n, n) += 1.0 / (rho_ * alpha_bs_[n]);
    }
    return E;
}

// ---------- KKT pair and objective ----------

KktPair build_kkt_matrices(const QuotientMatrices &Q, const arma::cx_vec &v, double mu)
{
    const arma::uword N = Q.n_antennas(), K = Q.n_users();
    check_unit(v, N * K, "build_kkt_matrices");
    if (!(mu >= 0.0))
        throw PreconditionError("build_kkt_matrices: mu must be non-negative");

    const QuadForms f = Q.quad_forms(v);
    if (!(f.a.min() > 0.0) || !(f.b.min() > 0.0) || !(f.e.min() > 0.0))
        throw SolverError("degenerate quadratic form in the KKT pair", "");

    const arma::cx_mat &g = Q.effective_channels();
    const arma::vec inv_a = 1.0 / f.a, inv_b = 1.0 / f.b;

    // sum_k G_k / a_k + loading * sum_k 1/a_k, shared by every block of a_eff
    arma::cx_mat common_a = g * arma::diagmat(arma::conv_to<arma::cx_vec>::from(inv_a)) * g.t();
    common_a.diag() += arma::conv_to<arma::cx_vec>::from(Q.dac_weights() * inv_a + Q.noise_loading() * arma::accu(inv_a));

    arma::cx_mat common_b = g * arma::diagmat(arma::conv_to<arma::cx_vec>::from(inv_b)) * g.t();
    arma::vec diag_b = Q.dac_weights() * inv_b + Q.noise_loading() * arma::accu(inv_b);
    if (mu > 0.0)
    {
        // mu omega sum_n P_ant,n E_n / e_n is diagonal and identical across blocks
        const arma::vec w = mu * Q.omega_rho() * Q.p_ant() / f.e;
        diag_b += arma::accu(w) + w / (Q.rho() * Q.alpha_bs());
    }
    common_b.diag() += arma::conv_to<arma::cx_vec>::from(diag_b);

    std::vector<arma::cx_mat> a_blocks(K, common_a), b_blocks(K, common_b);
    for (arma::uword l = 0; l < K; ++l)
        b_blocks[l] -= (Q.alpha_ue()[l] * inv_b[l]) * (g.col(l) * g.col(l).t());
    return {BlockDiagonal(std::move(a_blocks)), BlockDiagonal(std::move(b_blocks))};
}

double objective_value(const QuotientMatrices &Q, const arma::cx_vec &v, double mu)
{
    check_unit(v, Q.n_antennas() * Q.n_users(), "objective_value");
    const QuadForms f = Q.quad_forms(v);
    double se = arma::accu(arma::log2(f.a) - arma::log2(f.b));
    if (mu == 0.0)
        return se;
    return se - mu * Q.omega_rho() * arma::dot(Q.p_ant(), arma::log2(f.e));
}

arma::cx_vec block_solve(const BlockDiagonal &B, const arma::cx_vec &y)
{
    const arma::uword n = B.block_size();
    arma::cx_vec x(y.n_elem);
    arma::cx_mat L;
    for (arma::uword i = 0; i < B.n_blocks(); ++i)
    {
        const arma::cx_vec rhs = y.subvec(i * n, i * n + n - 1);
        // Blocks are Hermitian up to rounding; restore exact symmetry for LAPACK.
        arma::cx_mat M = arma::symmatu(B.block(i));
        M.diag() = arma::conv_to<arma::cx_vec>::from(arma::vec(arma::real(M.diag())));
        if (arma::chol(L, M, "lower"))
        {
            arma::cx_vec z = arma::solve(arma::trimatl(L), rhs, arma::solve_opts::fast);
            x.subvec(i * n, i * n + n - 1) = arma::solve(arma::trimatu(L.t()), z, arma::solve_opts::fast);
        }
        else
        {
            arma::vec ev;
            arma::cx_mat U;
            if (!arma::eig_sym(ev, U, M))
                throw SolverError("eigendecomposition of a KKT block failed", "block=" + std::to_string(i));
            ev.transform([](double e) { return std::max(e, eigen_floor); });
            x.subvec(i * n, i * n + n - 1) = U * ((U.t() * rhs) / ev);
        }
    }
    return x;
}

double stationarity_residual(const QuotientMatrices &Q, const arma::cx_vec &v, double mu)
{
    const arma::cx_vec x = gpi_map(Q, v, mu);
    const double c = std::abs(arma::cdot(v, x)) / (arma::norm(v) * arma::norm(x));
    return std::sqrt(std::max(0.0, 1.0 - c * c));
}

GpiResult qgpi_do(const QuotientMatrices &Q, double mu, const arma::cx_vec &v0, double eps, int t_max)
{
    check_unit(v0, Q.n_antennas() * Q.n_users(), "qgpi_do");
    if (!(eps > 0.0) || t_max < 1)
        throw PreconditionError("qgpi_do: need eps > 0 and t_max >= 1");

    GpiResult r;
    r.v = v0;
    for (int t = 1; t <= t_max; ++t)
    {
        arma::cx_vec x;
        try
        {
            x = gpi_map(Q, r.v, mu);
        }
        catch (const SolverError &e)
        {
            throw SolverError(e.what(), "gpi=" + std::to_string(t), t);
        }
        const double nx = arma::norm(x);
        if (!std::isfinite(nx) || nx == 0.0)
            throw SolverError("Q-GPI-DO produced a non-finite iterate", "gpi=" + std::to_string(t), t);
        x /= nx;
        r.last_step = arma::norm(x - r.v);
        r.v = std::move(x);
        r.iterations = t;
        if (r.last_step <= eps)
        {
            r.converged = true;
            break;
        }
    }
    r.residual = stationarity_residual(Q, r.v, mu);
    return r;
}

arma::cx_vec mrt_direction(const arma::cx_mat &H, const QuantizationProfile &profile)
{
    arma::cx_vec v = arma::vectorise(arma::diagmat(arma::sqrt(profile.alpha_bs())) * H);
    const double n = arma::norm(v);
    if (!(n > 0.0))
        throw PreconditionError("mrt_direction: channel is identically zero");
    return v / n;
}

arma::cx_vec random_direction(arma::uword dim, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    arma::cx_vec v(dim);
    for (auto &z : v)
    {
        double re = gauss(rng);
        double im = gauss(rng);
        z = {re, im};
    }
    return v / arma::norm(v);
}

} // namespace qmimo
