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
#include "qpcas/kkt.hpp"

#include "qpcas/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace qpcas
{
    KktWeights kkt_weights(const CMat &w, const RateMatrices &m, const PowerModel &pm,
                           const LagrangianSettings &s)
    {
        KktWeights kw;
        kw.objective = lagrangian_value(w, m, pm, s);
        kw.lambda = kw.objective.lambda;
        const QuadForms &q = kw.objective.quad;

        if (s.with_common)
            kw.psi = softmin_weights(kw.objective.rates.common, s.a);
        else
            kw.psi = RVec::Zero(m.k);
        kw.a_c = (kw.psi.array() / q.num_c.array()).matrix();
        kw.a_p = q.num_p.cwiseInverse();
        kw.c2 = (kw.psi.array() / q.den_c.array()).matrix();
        kw.c3 = q.den_p.cwiseInverse();

        const RVec eq = e_quadratics(w, m.alpha, s.rho);
        const double l2rho = std::log2(1.0 + 1.0 / s.rho);
        kw.c1 = (s.mu * pm.p_ant.array() / (l2rho * eq.array())).matrix();
        // sum_i c1_i (I + rho^-1 e~_i e~_i^H): e~_i e~_i^H has 1/alpha_i at (i, i).
        kw.e_diag = (kw.c1.sum() + kw.c1.array() / (s.rho * m.alpha.array())).matrix();

        if (!kw.c1.allFinite() || !kw.c2.allFinite() || !kw.c3.allFinite() || !kw.a_c.allFinite())
            throw NumericalError("kkt_weights: non-finite weight");
        return kw;
    }

    CMat apply_a_kkt(const KktWeights &kw, const RateMatrices &m, const CMat &w)
    {
        const double r = m.ridge();
        CMat out = CMat::Zero(m.n, m.k + 1);
        for (int s = 0; s <= m.k; ++s)
        {
            const CVec ws = w.col(s);
            CVec acc = CVec::Zero(m.n);
            for (int k = 0; k < m.k; ++k)
            {
                const auto kk = static_cast<std::size_t>(k);
                if (s == 0)
                {
                    // A_c uses G_k, A_k uses D_k in the common slot.
                    if (kw.a_c(k) != 0.0)
                        acc += kw.a_c(k) * (m.apply_g(k, ws) + r * ws);
                    acc += kw.a_p(k) * ((m.d[kk].array() + r) * ws.array()).matrix();
                }
                else
                    acc += (kw.a_c(k) + kw.a_p(k)) * (m.apply_g(k, ws) + r * ws);
            }
            out.col(s) = acc;
        }
        return out;
    }

    CMat apply_b_kkt(const KktWeights &kw, const RateMatrices &m, const CMat &w)
    {
        const double r = m.ridge();
        CMat out = CMat::Zero(m.n, m.k + 1);
        for (int s = 0; s <= m.k; ++s)
        {
            const CVec ws = w.col(s);
            CVec acc = (kw.e_diag.array() * ws.array()).matrix();
            for (int k = 0; k < m.k; ++k)
            {
                const auto kk = static_cast<std::size_t>(k);
                if (s == 0)
                {
                    if (kw.c2(k) != 0.0)
                        acc += kw.c2(k) * (m.apply_cd(k, ws) + r * ws);
                    acc += kw.c3(k) * ((m.d[kk].array() + r) * ws.array()).matrix();
                }
                else
                {
                    CVec gw = m.apply_g(k, ws) + r * ws;
                    acc += (kw.c2(k) + kw.c3(k)) * gw;
                    if (s == k + 1)
                        acc -= kw.c3(k) * kernels::dotc(m.u[kk], ws) * m.u[kk];
                }
            }
            out.col(s) = acc;
        }
        return out;
    }

    CMat lagrangian_gradient(const KktWeights &kw, const RateMatrices &m, const CMat &w)
    {
        return (apply_a_kkt(kw, m, w) - apply_b_kkt(kw, m, w)) / std::log(2.0);
    }

    CMat a_kkt_block(const KktWeights &kw, const RateMatrices &m, int slot)
    {
        CMat a = CMat::Zero(m.n, m.n);
        const double r = m.ridge();
        for (int k = 0; k < m.k; ++k)
        {
            const auto kk = static_cast<std::size_t>(k);
            CMat g = m.g_dense(k);
            g.diagonal().array() += r;
            if (slot == 0)
            {
                a += kw.a_c(k) * g;
                a.diagonal() += (kw.a_p(k) * (m.d[kk].array() + r)).matrix().cast<cplx>();
            }
            else
                a += (kw.a_c(k) + kw.a_p(k)) * g;
        }
        return a;
    }

    namespace
    {
        // diag(e) + sum_k (c2 + c3)(G_k + r): the part shared by blocks 1..K.
        CMat private_core(const KktWeights &kw, const RateMatrices &m)
        {
            CMat b = CMat::Zero(m.n, m.n);
            b.diagonal() = kw.e_diag.cast<cplx>();
            const double r = m.ridge();
            for (int k = 0; k < m.k; ++k)
            {
                const auto kk = static_cast<std::size_t>(k);
                const double wgt = kw.c2(k) + kw.c3(k);
                if (m.iid)
                {
                    b.diagonal() += (wgt * (m.err_var[kk] * m.alpha.array() + m.d[kk].array() + r)).matrix().cast<cplx>();
                    kernels::her(wgt, m.u[kk], b);
                }
                else
                {
                    b += wgt * m.c[kk];
                    b.diagonal() += (wgt * (m.d[kk].array() + r)).matrix().cast<cplx>();
                    kernels::her(wgt, m.u[kk], b);
                }
            }
            return b;
        }

        CMat common_block(const KktWeights &kw, const RateMatrices &m)
        {
            CMat b = CMat::Zero(m.n, m.n);
            b.diagonal() = kw.e_diag.cast<cplx>();
            const double r = m.ridge();
            for (int k = 0; k < m.k; ++k)
            {
                const auto kk = static_cast<std::size_t>(k);
                if (kw.c2(k) != 0.0)
                    b += kw.c2(k) * m.c_dense(k);
                b.diagonal() += ((kw.c2(k) + kw.c3(k)) * (m.d[kk].array() + r)).matrix().cast<cplx>();
            }
            return b;
        }
    }

    CMat b_kkt_block(const KktWeights &kw, const RateMatrices &m, int slot)
    {
        if (slot == 0)
            return common_block(kw, m);
        CMat b = private_core(kw, m);
        const auto kk = static_cast<std::size_t>(slot - 1);
        kernels::her(-kw.c3(slot - 1), m.u[kk], b);
        return b;
    }

    CMat KktOperator::apply_a(const CMat &w) const
    {
        CMat out(w.rows(), w.cols());
        for (Eigen::Index s = 0; s < w.cols(); ++s)
            out.col(s) = lambda_num * (a_blocks[static_cast<std::size_t>(s)] * w.col(s));
        return out;
    }

    CMat KktOperator::apply_b(const CMat &w) const
    {
        CMat out(w.rows(), w.cols());
        for (Eigen::Index s = 0; s < w.cols(); ++s)
            out.col(s) = lambda_den * (b_blocks[static_cast<std::size_t>(s)] * w.col(s));
        return out;
    }

    CMat KktOperator::solve_b(const CMat &rhs) const
    {
        CMat out(rhs.rows(), rhs.cols());
        for (Eigen::Index s = 0; s < rhs.cols(); ++s)
        {
            Eigen::LLT<CMat> llt(b_blocks[static_cast<std::size_t>(s)]);
            if (llt.info() != Eigen::Success)
                throw NumericalError("KktOperator: B block not positive definite");
            out.col(s) = llt.solve(rhs.col(s)) / lambda_den;
        }
        return out;
    }

    KktOperator build_kkt_operator(const KktWeights &kw, const RateMatrices &m, double lambda_num,
                                   double lambda_den)
    {
        KktOperator op;
        op.lambda_num = lambda_num;
        op.lambda_den = lambda_den;
        for (int s = 0; s <= m.k; ++s)
        {
            op.a_blocks.push_back(a_kkt_block(kw, m, s));
            op.b_blocks.push_back(b_kkt_block(kw, m, s));
        }
        return op;
    }

    CMat solve_b_dense(const KktWeights &kw, const RateMatrices &m, const CMat &rhs)
    {
        CMat out(m.n, m.k + 1);
        {
            Eigen::LLT<CMat> llt(common_block(kw, m));
            if (llt.info() != Eigen::Success)
                throw NumericalError("solve_b_dense: common block not positive definite");
            out.col(0) = llt.solve(rhs.col(0));
        }
        const CMat core = private_core(kw, m);
        for (int s = 1; s <= m.k; ++s)
        {
            CMat b = core;
            kernels::her(-kw.c3(s - 1), m.u[static_cast<std::size_t>(s - 1)], b);
            Eigen::LLT<CMat> llt(b);
            if (llt.info() != Eigen::Success)
                throw NumericalError("solve_b_dense: private block not positive definite");
            out.col(s) = llt.solve(rhs.col(s));
        }
        return out;
    }

    CMat gpi_step(const KktWeights &kw, const RateMatrices &m, const CMat &w, SolverPath path)
    {
        const CMat aw = apply_a_kkt(kw, m, w);
        CMat next = path == SolverPath::sherman_morrison ? solve_b_sm(kw, m, aw) : solve_b_dense(kw, m, aw);
        const double nrm = next.norm();
        if (!std::isfinite(nrm) || nrm == 0.0)
            throw NumericalError("gpi_step: degenerate update");
        return next / nrm;
    }

    double stationarity_residual(const KktWeights &kw, const RateMatrices &m, const CMat &w,
                                 SolverPath path)
    {
        const CMat aw = apply_a_kkt(kw, m, w);
        const CMat x = path == SolverPath::sherman_morrison ? solve_b_sm(kw, m, aw) : solve_b_dense(kw, m, aw);
        return (x - w).norm();
    }
}
