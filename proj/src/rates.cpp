// SPDX-License-Identifier: Apache-2.0
//
// qpcas - joint precoding, antenna selection and power control for
// quantized MU-MIMO rate-splitting downlinks
// Copyright (C) 2026 The qpcas Authors
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
#include "qpcas/rates.hpp"

#include "qpcas/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qpcas
{
    namespace
    {
        void check_shapes(const CMat &f, const CMat &h, const QuantizationProfile &profile)
        {
            if (f.rows() != h.rows() || static_cast<std::size_t>(h.rows()) != profile.size() ||
                f.cols() != h.cols() + 1)
                throw std::invalid_argument("rate evaluation: dimension mismatch");
        }
    }

    StreamRates instantaneous_rates(const CMat &f, const CMat &h, const QuantizationProfile &profile,
                                    double p, double noise)
    {
        check_shapes(f, h, profile);
        const Eigen::Index k_users = h.cols();
        const RVec rq = quantization_noise_cov(f, p, profile);
        // g(k, s) = h_k^H Phi_a f_s
        const CMat g = h.adjoint() * profile.alpha.cast<cplx>().asDiagonal() * f;

        StreamRates r;
        r.common.resize(k_users);
        r.priv.resize(k_users);
        for (Eigen::Index k = 0; k < k_users; ++k)
        {
            const double qe = (h.col(k).cwiseAbs2().array() * rq.array()).sum();
            double iui = 0.0;
            for (Eigen::Index s = 1; s <= k_users; ++s)
                iui += p * std::norm(g(k, s));
            const double sig_c = p * std::norm(g(k, 0));
            const double sig_p = p * std::norm(g(k, k + 1));
            const double den_c = iui + qe + noise;
            const double den_p = iui - sig_p + qe + noise;
            r.common(k) = std::log2((den_c + sig_c) / den_c);
            r.priv(k) = std::log2((den_p + sig_p) / den_p);
        }
        return r;
    }

    StreamRates lower_bound_rates(const CMat &f, const CMat &h_hat, const std::vector<CMat> &r_err,
                                  const QuantizationProfile &profile, double p, double noise)
    {
        check_shapes(f, h_hat, profile);
        const Eigen::Index k_users = h_hat.cols();
        if (static_cast<Eigen::Index>(r_err.size()) != k_users)
            throw std::invalid_argument("lower_bound_rates: need one error covariance per user");
        const CMat af = profile.alpha.cast<cplx>().asDiagonal() * f;  // Phi_a f_s
        const RVec ab = (profile.alpha.array() * profile.beta.array()).matrix();

        StreamRates r;
        r.common.resize(k_users);
        r.priv.resize(k_users);
        for (Eigen::Index k = 0; k < k_users; ++k)
        {
            const CVec hk = h_hat.col(k);
            const CMat &rk = r_err[static_cast<std::size_t>(k)];
            const CMat cov = hk * hk.adjoint() + rk;
            const RVec dg = cov.diagonal().real();

            double qe = 0.0;
            for (Eigen::Index s = 0; s <= k_users; ++s)
                qe += (ab.array() * dg.array() * f.col(s).cwiseAbs2().array()).sum();

            auto full = [&](Eigen::Index s) { return std::real(af.col(s).dot(cov * af.col(s))); };
            auto err = [&](Eigen::Index s) { return std::real(af.col(s).dot(rk * af.col(s))); };

            double iui_c = err(0);
            for (Eigen::Index s = 1; s <= k_users; ++s)
                iui_c += full(s);
            double iui_p = err(k + 1);
            for (Eigen::Index s = 1; s <= k_users; ++s)
                if (s != k + 1)
                    iui_p += full(s);

            const double sig_c = std::norm(hk.dot(af.col(0)));
            const double sig_p = std::norm(hk.dot(af.col(k + 1)));
            const double den_c = iui_c + qe + noise / p;
            const double den_p = iui_p + qe + noise / p;
            r.common(k) = std::log2((den_c + sig_c) / den_c);
            r.priv(k) = std::log2((den_p + sig_p) / den_p);
        }
        return r;
    }

    // -- RateMatrices -----------------------------------------------------

    CVec RateMatrices::apply_c(int user, const CVec &x) const
    {
        const auto ku = static_cast<std::size_t>(user);
        if (iid)
            return (err_var[ku] * alpha.array() * x.array()).matrix();
        return kernels::gemv(c[ku], x);
    }

    CVec RateMatrices::apply_cd(int user, const CVec &x) const
    {
        CVec y = apply_c(user, x);
        y.array() += d[static_cast<std::size_t>(user)].array() * x.array();
        return y;
    }

    CVec RateMatrices::apply_g(int user, const CVec &x) const
    {
        const CVec &uk = u[static_cast<std::size_t>(user)];
        CVec y = apply_cd(user, x);
        kernels::axpy(kernels::dotc(uk, x), uk, y);
        return y;
    }

    double RateMatrices::quad_c(int user, const CVec &x) const
    {
        const auto ku = static_cast<std::size_t>(user);
        if (iid)
            return err_var[ku] * kernels::weighted_norm2(alpha, x);
        return std::real(kernels::dotc(x, kernels::gemv(c[ku], x)));
    }

    CMat RateMatrices::c_dense(int user) const
    {
        const auto ku = static_cast<std::size_t>(user);
        if (iid)
            return (err_var[ku] * alpha).cast<cplx>().asDiagonal();
        return c[ku];
    }

    CMat RateMatrices::gc_dense(int user) const
    {
        const CVec &uk = u[static_cast<std::size_t>(user)];
        return uk * uk.adjoint() + c_dense(user);
    }

    CMat RateMatrices::g_dense(int user) const
    {
        CMat g = gc_dense(user);
        g.diagonal() += d[static_cast<std::size_t>(user)].cast<cplx>();
        return g;
    }

    CMat RateMatrices::block_ac(int user, int /*slot*/) const
    {
        CMat b = g_dense(user);
        b.diagonal().array() += ridge();
        return b;
    }

    CMat RateMatrices::block_bc(int user, int slot) const
    {
        CMat b = block_ac(user, slot);
        if (slot == 0)
        {
            const CVec &uk = u[static_cast<std::size_t>(user)];
            b -= uk * uk.adjoint();
        }
        return b;
    }

    CMat RateMatrices::block_a(int user, int slot) const
    {
        if (slot == 0)
        {
            CMat b = CMat::Zero(n, n);
            b.diagonal() = (d[static_cast<std::size_t>(user)].array() + ridge()).matrix().cast<cplx>();
            return b;
        }
        return block_ac(user, slot);
    }

    CMat RateMatrices::block_b(int user, int slot) const
    {
        CMat b = block_a(user, slot);
        if (slot == user + 1)
        {
            const CVec &uk = u[static_cast<std::size_t>(user)];
            b -= uk * uk.adjoint();
        }
        return b;
    }

    namespace
    {
        RateMatrices assemble_common(const CMat &h_hat, const QuantizationProfile &profile, double tau,
                                     double p, double noise)
        {
            if (static_cast<std::size_t>(h_hat.rows()) != profile.size())
                throw std::invalid_argument("assemble_rate_matrices: dimension mismatch");
            if (!(tau > 0.0 && tau <= 1.0))
                throw std::invalid_argument("assemble_rate_matrices: tau outside (0, 1]");
            RateMatrices m;
            m.n = static_cast<int>(h_hat.rows());
            m.k = static_cast<int>(h_hat.cols());
            m.tau = tau;
            m.p = p;
            m.noise = noise;
            m.alpha = profile.alpha;
            const RVec sqa = profile.alpha.cwiseSqrt();
            for (int k = 0; k < m.k; ++k)
                m.u.push_back((sqa.array() * h_hat.col(k).array()).matrix());
            return m;
        }
    }

    RateMatrices assemble_rate_matrices(const CMat &h_hat, const std::vector<CMat> &r_err,
                                        const QuantizationProfile &profile, double tau, double p,
                                        double noise)
    {
        RateMatrices m = assemble_common(h_hat, profile, tau, p, noise);
        if (static_cast<int>(r_err.size()) != m.k)
            throw std::invalid_argument("assemble_rate_matrices: need one error covariance per user");
        const RVec sqa = profile.alpha.cwiseSqrt();
        for (int k = 0; k < m.k; ++k)
        {
            const CMat &r = r_err[static_cast<std::size_t>(k)];
            m.c.push_back(sqa.cast<cplx>().asDiagonal() * r * sqa.cast<cplx>().asDiagonal());
            const RVec dg = h_hat.col(k).cwiseAbs2() + r.diagonal().real();
            m.d.push_back((profile.beta.array() * dg.array()).matrix());
        }
        return m;
    }

    RateMatrices assemble_rate_matrices_iid(const CMat &h_hat, const std::vector<double> &err_var,
                                            const QuantizationProfile &profile, double tau, double p,
                                            double noise)
    {
        RateMatrices m = assemble_common(h_hat, profile, tau, p, noise);
        if (static_cast<int>(err_var.size()) != m.k)
            throw std::invalid_argument("assemble_rate_matrices_iid: need one variance per user");
        m.iid = true;
        m.err_var = err_var;
        for (int k = 0; k < m.k; ++k)
        {
            const RVec dg = (h_hat.col(k).cwiseAbs2().array() + err_var[static_cast<std::size_t>(k)]).matrix();
            m.d.push_back((profile.beta.array() * dg.array()).matrix());
        }
        return m;
    }

    RateMatrices assemble_rate_matrices(const ChannelSet &channels, const QuantizationProfile &profile,
                                        double tau, double p, double noise, bool iid)
    {
        if (iid)
            return assemble_rate_matrices_iid(channels.h_hat, channels.r_err_iid_var, profile, tau, p, noise);
        return assemble_rate_matrices(channels.h_hat, channels.r_err, profile, tau, p, noise);
    }

    QuadForms evaluate_quadratics(const RateMatrices &m, const CMat &w)
    {
        if (w.rows() != m.n || w.cols() != m.k + 1)
            throw std::invalid_argument("evaluate_quadratics: W must be N x (K+1)");
        const int slots = m.k + 1;
        const double r = m.ridge() * w.squaredNorm();

        QuadForms q;
        q.num_c.resize(m.k);
        q.den_c.resize(m.k);
        q.num_p.resize(m.k);
        q.den_p.resize(m.k);
        q.signal.resize(m.k, slots);

        std::vector<CVec> cols(static_cast<std::size_t>(slots));
        for (int s = 0; s < slots; ++s)
            cols[static_cast<std::size_t>(s)] = w.col(s);

        for (int k = 0; k < m.k; ++k)
        {
            const CVec &uk = m.u[static_cast<std::size_t>(k)];
            const RVec &dk = m.d[static_cast<std::size_t>(k)];
            double rest = 0.0;   // sum over s >= 1 of (signal + C + D)
            double others = 0.0; // same, without the own private signal
            double sig0 = 0.0, cd0 = 0.0, d0 = 0.0;
            for (int s = 0; s < slots; ++s)
            {
                const CVec &ws = cols[static_cast<std::size_t>(s)];
                const double sig = std::norm(kernels::dotc(uk, ws));
                const double dq = kernels::weighted_norm2(dk, ws);
                const double cq = m.quad_c(k, ws);
                q.signal(k, s) = sig;
                if (s == 0)
                {
                    sig0 = sig;
                    cd0 = cq + dq;
                    d0 = dq;
                    continue;
                }
                rest += sig + cq + dq;
                others += (s == k + 1) ? cq + dq : sig + cq + dq;
            }
            q.den_c(k) = cd0 + rest + r;
            q.num_c(k) = q.den_c(k) + sig0;
            q.num_p(k) = d0 + rest + r;
            const double den_p = d0 + others + r;
            q.den_p(k) = den_p;
        }
        return q;
    }

    StreamRates rates_from_quadratics(const QuadForms &q)
    {
        StreamRates r;
        r.common = (q.num_c.array() / q.den_c.array()).log() / std::log(2.0);
        r.priv = (q.num_p.array() / q.den_p.array()).log() / std::log(2.0);
        return r;
    }

    CMat precoder_from_direction(const CMat &w, const RVec &alpha, double tau)
    {
        return std::sqrt(tau) * (alpha.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() * w);
    }

    CMat direction_from_precoder(const CMat &f, const RVec &alpha, double tau)
    {
        return (alpha.cwiseSqrt().cast<cplx>().asDiagonal() * f) / std::sqrt(tau);
    }

    double logsumexp_softmin(const RVec &values, double a)
    {
        if (!(a > 0.0))
            throw std::invalid_argument("logsumexp_softmin: a must be positive");
        const double vmin = values.minCoeff();
        const double s = (-(values.array() - vmin) / a).exp().sum();
        return vmin - a * std::log(s);
    }

    RVec softmin_weights(const RVec &values, double a)
    {
        const double vmin = values.minCoeff();
        RVec e = (-(values.array() - vmin) / a).exp().matrix();
        return e / e.sum();
    }

    SmoothObjective lagrangian_value(const CMat &w, const RateMatrices &m, const PowerModel &pm,
                                     const LagrangianSettings &s)
    {
        SmoothObjective o;
        o.quad = evaluate_quadratics(m, w);
        o.rates = rates_from_quadratics(o.quad);
        if (!s.with_common)
            o.rates.common.setZero();

        const double ln2 = std::log(2.0);
        o.l1 = s.with_common ? logsumexp_softmin(o.rates.common, s.a) : 0.0;
        o.l2 = o.rates.priv.sum();
        o.smooth_power = smooth_antenna_power(w, m.alpha, pm, s.rho);
        const double p_tx = m.tau * m.p;
        o.l3 = -s.mu * (p_tx / pm.pa_efficiency + pm.p_lo + o.smooth_power - s.p_total);
        o.l = o.l1 + o.l2 + o.l3;

        // Product form. The soft-min factor is rescaled by the smallest
        // common ratio so that ratio^(-1/(a ln 2)) stays representable.
        double f1 = 1.0;
        if (s.with_common)
        {
            const RVec ratio = (o.quad.num_c.array() / o.quad.den_c.array()).matrix();
            const double rmin = ratio.minCoeff();
            const double gamma = 1.0 / (s.a * ln2);
            double acc = 0.0;
            for (Eigen::Index k = 0; k < ratio.size(); ++k)
                acc += std::pow(ratio(k) / rmin, -gamma);
            f1 = std::pow(rmin, 1.0 / ln2) * std::pow(acc, -s.a);
        }
        double f2 = std::exp(-s.mu * (p_tx / pm.pa_efficiency - s.p_total + pm.p_lo));
        for (Eigen::Index k = 0; k < o.quad.num_p.size(); ++k)
            f2 *= std::pow(o.quad.num_p(k) / o.quad.den_p(k), 1.0 / ln2);
        const RVec eq = e_quadratics(w, m.alpha, s.rho);
        const double scale = ln2 * std::log2(1.0 + 1.0 / s.rho);
        double f3 = 1.0;
        for (Eigen::Index i = 0; i < eq.size(); ++i)
            f3 *= std::pow(eq(i), s.mu * pm.p_ant(i) / scale);
        o.lambda = f1 * f2 / f3;

        if (!std::isfinite(o.l) || !std::isfinite(o.lambda) || !(o.lambda > 0.0))
            throw NumericalError("lagrangian_value: non-finite objective");
        if (std::abs(std::log(o.lambda) - o.l) > 1e-9 * (1.0 + std::abs(o.l)))
            throw NumericalError("lagrangian_value: product and additive forms disagree");
        return o;
    }
}
