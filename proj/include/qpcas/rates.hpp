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
#pragma once

#include "qpcas/channel.hpp"
#include "qpcas/power.hpp"
#include "qpcas/sysmodel.hpp"

#include <vector>

namespace qpcas
{
    // Per-user common and private rates in bits/s/Hz.
    struct StreamRates
    {
        RVec common;   // R_c,k
        RVec priv;     // R_k

        double common_min() const { return common.size() ? common.minCoeff() : 0.0; }
        double private_sum() const { return priv.sum(); }
        double sum() const { return common_min() + private_sum(); }
    };

    // Rates of the AQNM model for a known channel H (N x K). Column 0 of F is
    // the common precoder, column k the private precoder of user k.
    StreamRates instantaneous_rates(const CMat &f, const CMat &h, const QuantizationProfile &profile,
                                    double p, double noise);

    // Conditional-average lower bounds given estimates and error covariances.
    StreamRates lower_bound_rates(const CMat &f, const CMat &h_hat, const std::vector<CMat> &r_err,
                                  const QuantizationProfile &profile, double p, double noise);

    // Structured storage of the block-diagonal Rayleigh-quotient matrices.
    //
    // With u_k = Phi_a^{1/2} h_hat_k, C_k = Phi_a^{1/2} R_err,k Phi_a^{1/2} and
    // D_k = Phi_b diag(|h_hat_k|^2 + diag R_err,k):
    //   G_k  = u_k u_k^H + C_k + D_k,  G_c,k = u_k u_k^H + C_k
    //   A_c,k = blkdiag(G_k, ..., G_k) + r I,   B_c,k = A_c,k - blkdiag(u u^H, 0, ...)
    //   A_k   = blkdiag(D_k, G_k, ..., G_k) + r I, B_k = A_k - (u u^H in slot k+1)
    // with ridge r = noise / (tau P). In IID mode C_k = s_k^2 Phi_a.
    class RateMatrices
    {
    public:
        int n = 0;
        int k = 0;
        bool iid = false;
        double tau = 1.0;
        double p = 1.0;
        double noise = 1.0;

        RVec alpha;
        std::vector<CVec> u;
        std::vector<CMat> c;          // full mode only
        std::vector<double> err_var;  // IID mode only
        std::vector<RVec> d;

        double ridge() const { return noise / (tau * p); }
        void set_tau(double t) { tau = t; }

        // C_k x
        CVec apply_c(int user, const CVec &x) const;
        // (C_k + D_k) x
        CVec apply_cd(int user, const CVec &x) const;
        // G_k x
        CVec apply_g(int user, const CVec &x) const;
        // x^H C_k x
        double quad_c(int user, const CVec &x) const;

        // Dense N x N blocks, for tests and the dense solver.
        CMat c_dense(int user) const;
        CMat g_dense(int user) const;
        CMat gc_dense(int user) const;
        CMat block_ac(int user, int slot) const;
        CMat block_bc(int user, int slot) const;
        CMat block_a(int user, int slot) const;
        CMat block_b(int user, int slot) const;
    };

    RateMatrices assemble_rate_matrices(const CMat &h_hat, const std::vector<CMat> &r_err,
                                        const QuantizationProfile &profile, double tau, double p,
                                        double noise);

    // R_err,k replaced by s_k^2 I.
    RateMatrices assemble_rate_matrices_iid(const CMat &h_hat, const std::vector<double> &err_var,
                                            const QuantizationProfile &profile, double tau, double p,
                                            double noise);

    RateMatrices assemble_rate_matrices(const ChannelSet &channels, const QuantizationProfile &profile,
                                        double tau, double p, double noise, bool iid);

    // Numerators and denominators of the four quotients per user, and the
    // signal powers |u_k^H w_s|^2 (K x (K+1)).
    struct QuadForms
    {
        RVec num_c, den_c, num_p, den_p;
        RMat signal;
    };

    QuadForms evaluate_quadratics(const RateMatrices &m, const CMat &w);

    StreamRates rates_from_quadratics(const QuadForms &q);

    // Precoder with Tr(Phi_a F F^H) = tau: F = sqrt(tau) Phi_a^{-1/2} W.
    CMat precoder_from_direction(const CMat &w, const RVec &alpha, double tau);
    CMat direction_from_precoder(const CMat &f, const RVec &alpha, double tau);

    // -a ln sum exp(-v/a), evaluated with the usual max shift.
    double logsumexp_softmin(const RVec &values, double a);

    // Gradient of logsumexp_softmin: softmax(-v/a).
    RVec softmin_weights(const RVec &values, double a);

    struct SmoothObjective
    {
        double l = 0.0;       // L1 + L2 + L3
        double lambda = 0.0;  // product form, ln(lambda) == l
        double l1 = 0.0;      // soft-min common rate, bits
        double l2 = 0.0;      // private sum rate, bits
        double l3 = 0.0;      // -mu (tau P / s + P_LO + smooth P_ant - P_tot)
        double smooth_power = 0.0;
        StreamRates rates;
        QuadForms quad;
    };

    struct LagrangianSettings
    {
        double mu = 0.0;
        double a = 0.1;
        double rho = 1e-12;
        double p_total = 1.0;
        bool with_common = true;
    };

    // Throws NumericalError if the product and additive forms disagree or a
    // term is not finite.
    SmoothObjective lagrangian_value(const CMat &w, const RateMatrices &m, const PowerModel &pm,
                                     const LagrangianSettings &s);
}
