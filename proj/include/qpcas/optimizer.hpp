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
#include "qpcas/kkt.hpp"
#include "qpcas/power.hpp"
#include "qpcas/rates.hpp"
#include "qpcas/sysmodel.hpp"

#include <utility>
#include <vector>

namespace qpcas
{
    // -- direction (fixed tau, mu) ----------------------------------------

    struct DirectionResult
    {
        CMat w;
        int iterations = 0;
        double step_norm = 0.0;
        bool converged = false;
    };

    // Fixed-point iteration on the KKT eigenproblem until the step norm drops
    // to cfg.eps_gpi or cfg.t_max updates have been taken.
    DirectionResult solve_direction(const CMat &w0, const RateMatrices &m, const PowerModel &pm,
                                    const LagrangianSettings &s, const SystemConfig &cfg, SolverPath path);

    // -- power scale --------------------------------------------------------

    // dL/dtau at the tau stored in m. The antenna-power term does not depend
    // on tau, so the only multiplier contribution is -mu P / s.
    double tau_gradient(const CMat &w, const RateMatrices &m, const PowerModel &pm,
                        const LagrangianSettings &s);

    // L as a function of tau with W fixed. Cheap to evaluate: the quadratic
    // forms are cached and only the ridge moves with tau.
    class TauObjective
    {
    public:
        TauObjective(const CMat &w, const RateMatrices &m, const PowerModel &pm, const LagrangianSettings &s);

        double value(double tau) const;
        double gradient(double tau) const;

    private:
        RVec base_num_c_, base_den_c_, base_num_p_, base_den_p_;
        RVec sig_c_, sig_p_;
        double w_norm2_ = 1.0;
        double noise_over_p_ = 0.0;
        double p_ = 0.0;
        double pa_efficiency_ = 1.0;
        double constant_ = 0.0;  // tau-independent part of L3
        double mu_ = 0.0;
        double a_ = 0.1;
        bool with_common_ = true;
    };

    struct TauResult
    {
        double tau = 1.0;
        int iterations = 0;
        bool converged = false;
    };

    // Projected gradient ascent on tau with Armijo backtracking, tau kept in
    // [cfg.tau_min, 1].
    TauResult solve_tau(double tau0, const CMat &w, const RateMatrices &m, const PowerModel &pm,
                        const LagrangianSettings &s, const SystemConfig &cfg);

    // -- antenna selection and multiplier --------------------------------

    // Keep antenna i when ||row_i||^2 / alpha_i is at least eps_as times the
    // largest such value.
    AntennaMask select_antennas(const CMat &w, const RVec &alpha, double eps_as);

    // mu' = max(0, mu + delta) when infeasible, max(0, mu - delta) otherwise;
    // the step is halved either way.
    std::pair<double, double> update_mu_bisection(double mu, double delta, bool feasible);

    // -- joint solver ---------------------------------------------------------

    struct RoundTrace
    {
        int iters_f = 0;
        std::vector<double> f_change;
        double mu = 0.0;   // multiplier used during the round
        double tau = 0.0;
        double sum_se = 0.0;
        int n_active = 0;
        bool feasible = false;
    };

    struct PrecoderSolution
    {
        CMat w;                // N x (K+1), zero rows on inactive antennas
        CMat f;                // sqrt(tau) Phi_a^{-1/2} W
        double tau = 1.0;
        double mu = 0.0;
        AntennaMask active;
        int iters_mu = 0;
        int final_gpi_iters = 0;
        bool final_gpi_converged = false;
        std::vector<RoundTrace> rounds;

        // Median of the per-round inner-loop counts (0 when no rounds ran).
        int median_iters_f() const;
    };

    struct QpcasOptions
    {
        bool with_common = true;  // false: SDMA, no common stream
        bool low_complexity = false;
    };

    // Starting direction from the quantization-aware RZF precoder.
    CMat initial_direction(const ChannelSet &channels, const QuantizationProfile &profile,
                           const SystemConfig &cfg, bool with_common);

    PrecoderSolution solve_qpcas(const ChannelSet &channels, const QuantizationProfile &profile,
                           const SystemConfig &cfg, const QpcasOptions &opt = {});
}
