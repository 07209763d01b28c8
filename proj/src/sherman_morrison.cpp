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
#include "qpcas/kernels.hpp"
#include "qpcas/kkt.hpp"

#include <cmath>
#include <stdexcept>

namespace qpcas
{
    namespace
    {
        constexpr double denominator_guard = 1e-12;
        constexpr double backward_tolerance = 1e-13;
        constexpr int refinement_passes = 2;

        // Private block times x: diag(d_private) x + sum_k (c2 + c3) u_k u_k^H x,
        // minus c3 u u^H x for the block's own user.
        CVec private_block_apply(int slot, const CVec &x, const SmBlockInverse &st, const KktWeights &kw,
                                 const RateMatrices &m)
        {
            CVec y = (st.d_private.array() * x.array()).matrix();
            for (int k = 0; k < m.k; ++k)
            {
                const CVec &uk = m.u[static_cast<std::size_t>(k)];
                const double g = kw.c2(k) + kw.c3(k) - (k == slot - 1 ? kw.c3(k) : 0.0);
                kernels::axpy(g * kernels::dotc(uk, x), uk, y);
            }
            return y;
        }
    }

    SmBlockInverse build_sm_inverse(const KktWeights &kw, const RateMatrices &m)
    {
        if (!m.iid)
            throw std::invalid_argument("build_sm_inverse: requires IID error covariances");
        const double r = m.ridge();

        SmBlockInverse st;
        st.c3 = kw.c3;
        st.d_common = kw.e_diag;
        st.d_private = kw.e_diag;
        for (int k = 0; k < m.k; ++k)
        {
            const auto kk = static_cast<std::size_t>(k);
            const RVec cd = (m.err_var[kk] * m.alpha.array() + m.d[kk].array() + r).matrix();
            const RVec dr = (m.d[kk].array() + r).matrix();
            st.d_common += kw.c2(k) * cd + kw.c3(k) * dr;
            st.d_private += (kw.c2(k) + kw.c3(k)) * cd;
        }

        // Z^(0) = D, then one rank-one update per user.
        st.z_inv = CMat::Zero(m.n, m.n);
        st.z_inv.diagonal() = st.d_private.cwiseInverse().cast<cplx>();
        for (int k = 0; k < m.k; ++k)
        {
            const CVec &uk = m.u[static_cast<std::size_t>(k)];
            const double g = kw.c2(k) + kw.c3(k);
            const CVec v = kernels::gemv(st.z_inv, uk);
            const double den = 1.0 + g * std::real(kernels::dotc(uk, v));
            kernels::her(-g / den, v, st.z_inv);
        }

        for (int k = 0; k < m.k; ++k)
        {
            const CVec &uk = m.u[static_cast<std::size_t>(k)];
            CVec v = kernels::gemv(st.z_inv, uk);
            st.downdate_den.push_back(1.0 - kw.c3(k) * std::real(kernels::dotc(uk, v)));
            st.z_inv_u.push_back(std::move(v));
        }
        return st;
    }

    CVec sm_block_solve(int slot, const CVec &rhs, const SmBlockInverse &st, const KktWeights &kw,
                        const RateMatrices &m)
    {
        if (slot == 0)
            return (rhs.array() / st.d_common.cast<cplx>().array()).matrix();

        const auto kk = static_cast<std::size_t>(slot - 1);
        const double den = st.downdate_den[kk];
        if (std::abs(den) < denominator_guard)
        {
            Eigen::LLT<CMat> llt(b_kkt_block(kw, m, slot));
            if (llt.info() != Eigen::Success)
                throw NumericalError("sm_block_solve: dense fallback failed");
            return llt.solve(rhs);
        }
        // (Z - c3 u u^H)^-1 x = Z^-1 x + c3 (Z^-1 u)(u^H Z^-1 x) / (1 - c3 u^H Z^-1 u)
        auto apply_inverse = [&](const CVec &x)
        {
            CVec z = kernels::gemv(st.z_inv, x);
            const cplx uz = kernels::dotc(m.u[kk], z);
            kernels::axpy(st.c3(slot - 1) * uz / den, st.z_inv_u[kk], z);
            return z;
        };

        // The denominator can lose most of its digits to cancellation when the
        // own-user term dominates the block. The block product is O(K N), so
        // check the backward error and refine; fall back to a dense solve if
        // refinement does not recover.
        double b_norm = st.d_private.cwiseAbs().maxCoeff();
        for (int k = 0; k < m.k; ++k)
            b_norm += (kw.c2(k) + kw.c3(k)) * m.u[static_cast<std::size_t>(k)].squaredNorm();
        const double r_norm = rhs.norm();

        CVec x = apply_inverse(rhs);
        for (int pass = 0; pass <= refinement_passes; ++pass)
        {
            const CVec res = rhs - private_block_apply(slot, x, st, kw, m);
            if (res.norm() <= backward_tolerance * (b_norm * x.norm() + r_norm))
                return x;
            if (pass < refinement_passes)
                x += apply_inverse(res);
        }
        Eigen::LLT<CMat> llt(b_kkt_block(kw, m, slot));
        if (llt.info() != Eigen::Success)
            throw NumericalError("sm_block_solve: dense fallback failed");
        return llt.solve(rhs);
    }

    CMat solve_b_sm(const KktWeights &kw, const RateMatrices &m, const CMat &rhs)
    {
        const SmBlockInverse st = build_sm_inverse(kw, m);
        CMat out(m.n, m.k + 1);
        for (int s = 0; s <= m.k; ++s)
            out.col(s) = sm_block_solve(s, rhs.col(s), st, kw, m);
        return out;
    }
}
