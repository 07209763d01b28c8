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

#include "qpcas/optimizer.hpp"

namespace qpcas
{
    // Quantization-aware RZF on the effective channel Phi_a h_hat_k:
    // private columns along H_eff (H_eff^H H_eff + delta I)^-1 with
    // delta = K noise / P and equal power per user. With a common stream, the
    // common column follows the dominant left singular vector of H_eff and
    // takes common_fraction of the power. Normalized to Tr(Phi_a F F^H) = 1.
    CMat qrzf_precoder(const CMat &h_hat, const QuantizationProfile &profile, double p, double noise,
                       bool with_common, double common_fraction = 0.1);

    // min(1, s (P_tot - P_cir(all antennas)) / P). Throws InfeasibleBudget
    // when the circuit alone exhausts the budget.
    double plain_power_scaling(const PowerModel &pm, double p, double p_total, double pa_efficiency);

    // SDMA RZF with plain power scaling.
    PrecoderSolution qrzf(const ChannelSet &channels, const QuantizationProfile &profile,
                          const SystemConfig &cfg);

    // Fixed-point precoder with mu = 0, all antennas on and tau from plain
    // power scaling: it knows the transmit limit but not the circuit cost.
    PrecoderSolution qgpirs(const ChannelSet &channels, const QuantizationProfile &profile,
                            const SystemConfig &cfg);

    // Joint solver without the common stream.
    PrecoderSolution qpcas_sdma(const ChannelSet &channels, const QuantizationProfile &profile,
                                const SystemConfig &cfg);
}
