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
#include "qpcas/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpcas
{
    CMat qrzf_precoder(const CMat &h_hat, const QuantizationProfile &profile, double p, double noise,
                       bool with_common, double common_fraction)
    {
        const Eigen::Index n = h_hat.rows(), k_users = h_hat.cols();
        if (static_cast<std::size_t>(n) != profile.size())
            throw std::invalid_argument("qrzf_precoder: dimension mismatch");
        if (with_common && !(common_fraction > 0.0 && common_fraction < 1.0))
            throw std::invalid_argument("qrzf_precoder: common_fraction outside (0, 1)");

        const CMat h_eff = profile.alpha.cast<cplx>().asDiagonal() * h_hat;
        const CMat gram = h_eff.adjoint() * h_eff;
        double delta = k_users * noise / p;
        CMat v;
        for (int attempt = 0;; ++attempt)
        {
            CMat reg = gram;
            reg.diagonal().array() += delta;
            Eigen::LLT<CMat> llt(reg);
            if (llt.info() == Eigen::Success)
            {
                v = h_eff * llt.solve(CMat::Identity(k_users, k_users));
                if (v.allFinite())
                    break;
            }
            if (attempt >= 30)
                throw NumericalError("qrzf_precoder: regularized Gram matrix stays singular");
            // Rank deficient Gram matrix: raise the regularization.
            delta = std::max(delta * 10.0, 1e-12 * gram.diagonal().real().maxCoeff());
        }

        const RVec sqa = profile.alpha.cwiseSqrt();
        auto weighted_norm = [&](const CVec &x) { return (sqa.cast<cplx>().asDiagonal() * x).norm(); };

        CMat f = CMat::Zero(n, k_users + 1);
        const double share = (with_common ? 1.0 - common_fraction : 1.0) / static_cast<double>(k_users);
        for (Eigen::Index k = 0; k < k_users; ++k)
        {
            const double nv = weighted_norm(v.col(k));
            if (nv > 0.0)
                f.col(k + 1) = std::sqrt(share) * v.col(k) / nv;
        }
        if (with_common)
        {
            Eigen::JacobiSVD<CMat> svd(h_eff, Eigen::ComputeThinU);
            const CVec u0 = svd.matrixU().col(0);
            f.col(0) = std::sqrt(common_fraction) * u0 / weighted_norm(u0);
        }
        return f;
    }

    double plain_power_scaling(const PowerModel &pm, double p, double p_total, double pa_efficiency)
    {
        const double p_cir = circuit_power(pm);
        if (!(p_total > p_cir))
            throw InfeasibleBudget("circuit power of the full array exceeds the budget");
        return std::min(1.0, pa_efficiency * (p_total - p_cir) / p);
    }

    namespace
    {
        PrecoderSolution all_active(const CMat &w, const QuantizationProfile &profile, double tau)
        {
            PrecoderSolution sol;
            sol.w = w;
            sol.tau = tau;
            sol.active.assign(profile.size(), true);
            sol.f = precoder_from_direction(w, profile.alpha, tau);
            return sol;
        }
    }

    PrecoderSolution qrzf(const ChannelSet &channels, const QuantizationProfile &profile, const SystemConfig &cfg)
    {
        cfg.validate();
        const PowerModel pm = PowerModel::make(profile, cfg);
        const double tau = plain_power_scaling(pm, cfg.p_max, cfg.p_total, cfg.pa_efficiency);
        // Regularize with the power actually radiated after scaling.
        const CMat f = qrzf_precoder(channels.h_hat, profile, tau * cfg.p_max, cfg.noise_power, false);
        CMat w = direction_from_precoder(f, profile.alpha, 1.0);
        return all_active(w / w.norm(), profile, tau);
    }

    PrecoderSolution qgpirs(const ChannelSet &channels, const QuantizationProfile &profile,
                            const SystemConfig &cfg)
    {
        cfg.validate();
        const PowerModel pm = PowerModel::make(profile, cfg);
        const double tau = plain_power_scaling(pm, cfg.p_max, cfg.p_total, cfg.pa_efficiency);
        const RateMatrices m = assemble_rate_matrices(channels, profile, tau, cfg.p_max, cfg.noise_power,
                                                      cfg.low_complexity);
        LagrangianSettings ls;
        ls.a = cfg.smoothing_a;
        ls.rho = cfg.indicator_rho;
        ls.p_total = cfg.p_total;
        const CMat w0 = initial_direction(channels, profile, cfg, true);
        const SolverPath path = cfg.low_complexity ? SolverPath::sherman_morrison : SolverPath::dense;
        const DirectionResult d = solve_direction(w0, m, pm, ls, cfg, path);
        PrecoderSolution sol = all_active(d.w, profile, tau);
        sol.final_gpi_iters = d.iterations;
        sol.final_gpi_converged = d.converged;
        return sol;
    }

    PrecoderSolution qpcas_sdma(const ChannelSet &channels, const QuantizationProfile &profile,
                                const SystemConfig &cfg)
    {
        QpcasOptions opt;
        opt.with_common = false;
        opt.low_complexity = cfg.low_complexity;
        return solve_qpcas(channels, profile, cfg, opt);
    }
}
