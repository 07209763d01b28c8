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

#include "qpcas/sysmodel.hpp"

namespace qpcas
{
    // 1.5e-5 * 2^b + 9e-12 * f_s * b, watts.
    double dac_power(int bits, double sampling_rate);

    // 2 P_LP + 2 P_M + P_H
    inline double rf_power(const CircuitConstants &c)
    {
        return 2.0 * c.p_lp + 2.0 * c.p_m + c.p_h;
    }

    struct PowerModel
    {
        double p_lo = 0.0;
        double pa_efficiency = 1.0;
        RVec p_ant;  // per antenna: 2 P_DAC(b_i) + P_RF

        static PowerModel make(const QuantizationProfile &profile, const SystemConfig &cfg);

        PowerModel restrict(const AntennaMask &mask) const;

        std::size_t size() const { return static_cast<std::size_t>(p_ant.size()); }
    };

    // P_LO + sum of p_ant over active antennas.
    double circuit_power(const AntennaMask &mask, const PowerModel &model);

    // Every antenna active.
    double circuit_power(const PowerModel &model);

    // x_i = ||row_i(W)||^2 / alpha_i, the effective per-antenna gain.
    RVec row_gains(const CMat &w, const RVec &alpha);

    // w^H E_i w = ||w||^2 + x_i / rho, without forming E_i.
    RVec e_quadratics(const CMat &w, const RVec &alpha, double rho);

    // Smooth surrogate of the antenna power:
    //   sum_i p_ant_i * ln(w^H E_i w) / (ln 2 * log2(1 + 1/rho))
    double smooth_antenna_power(const CMat &w, const RVec &alpha, const PowerModel &model, double rho);

    // tau * P, tau in (0, 1].
    double transmit_power(double tau, double p_max);

    // tau P / s + P_cir
    inline double total_consumption(double p_tx, double p_cir, double pa_efficiency)
    {
        return p_tx / pa_efficiency + p_cir;
    }
}
