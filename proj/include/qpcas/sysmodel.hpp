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

#include "qpcas/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qpcas
{
    // -- unit conversion --------------------------------------------------

    inline double dbm_to_watt(double dbm)
    {
        return std::pow(10.0, (dbm - 30.0) / 10.0);
    }

    inline double watt_to_dbm(double watt)
    {
        return 10.0 * std::log10(watt) + 30.0;
    }

    // Thermal noise: -174 dBm/Hz + 10 log10(bandwidth) + noise figure, in watts.
    double thermal_noise_power(double bandwidth_hz, double noise_figure_db);

    // How the optimizer decides feasibility inside the multiplier bisection.
    //   smooth: tau P / s + P_LO + smooth antenna power of the current direction
    //   hard:   tau P / s + P_LO + sum of p_ant over the active mask
    enum class FeasibilityMode
    {
        smooth,
        hard
    };

    // Circuit constants (watts) and PA efficiency.
    struct CircuitConstants
    {
        double p_lo = 22.5e-3;
        double p_lp = 14.0e-3;
        double p_m = 0.3e-3;
        double p_h = 3.0e-3;
    };

    struct SystemConfig
    {
        int n_antennas = 16;
        int n_users = 4;
        double p_max = 10.0;              // P [W]
        double p_total = 10.0;            // P_tot [W]
        double pa_efficiency = 0.27;      // varsigma
        double noise_power = thermal_noise_power(150e6, 5.0);
        double sampling_rate = 150e6;     // f_s [Hz]
        double kappa = 0.4;
        CircuitConstants circuit{};

        double smoothing_a = 0.05;        // LogSumExp temperature, in bits
        double indicator_rho = 1e-12;

        double eps_gpi = 0.01;
        int t_max = 20;
        double eps_f = 0.01;
        int t_f_max = 20;
        double eps_tau = 1e-3;
        int t_tau_max = 20;
        int t_mu_max = 20;
        double eps_as = 0.1;
        double delta_gd = 1.0;
        double delta_bm = 1.0;
        double tau_min = 1e-6;
        double armijo_c = 1e-4;
        int armijo_max_halvings = 30;

        FeasibilityMode feasibility = FeasibilityMode::smooth;
        bool low_complexity = false;
        std::uint64_t rng_seed = 1;

        // Throws std::invalid_argument naming the first violated invariant.
        void validate() const;
    };

    // -- AQNM quantization model ------------------------------------------

    // Normalized MSE of a b-bit Lloyd-Max quantizer on a Gaussian input.
    // Table for b <= 5, high-resolution approximation above.
    double distortion_factor(int bits);

    struct QuantizationProfile
    {
        std::vector<int> bits;  // 0 marks an ideal (infinite resolution) DAC
        RVec beta;
        RVec alpha;

        std::size_t size() const { return bits.size(); }

        // Bit count 0 marks an ideal DAC (beta = 0).
        static QuantizationProfile from_bits(const std::vector<int> &bits);

        // beta = 0, alpha = 1 on every antenna.
        static QuantizationProfile ideal(std::size_t n);

        QuantizationProfile restrict(const AntennaMask &mask) const;
    };

    // The resolution list is assigned in equal contiguous groups, e.g.
    // N = 16 with {4, 8, 12, 16} gives four antennas per resolution.
    std::vector<int> grouped_bits(int n_antennas, const std::vector<int> &levels);

    // diag(R_q) = alpha .* beta .* diag(P F F^H)
    RVec quantization_noise_cov(const CMat &f, double p, const QuantizationProfile &profile);

    // x_q = Phi_alpha x + noise_draw
    CVec quantize_signal(const CVec &x, const QuantizationProfile &profile, const CVec &noise_draw);

    // One draw of q ~ CN(0, diag(r_q)).
    CVec draw_quantization_noise(const RVec &r_q_diag, Rng &rng);
}
