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
#include "qpcas/sysmodel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpcas
{
    double thermal_noise_power(double bandwidth_hz, double noise_figure_db)
    {
        return dbm_to_watt(-174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
    }

    void SystemConfig::validate() const
    {
        auto fail = [](const std::string &what)
        { throw std::invalid_argument("SystemConfig: " + what); };

        if (n_users < 1)
            fail("n_users must be >= 1");
        if (n_antennas < n_users + 1)
            fail("n_antennas must be >= n_users + 1");
        if (!(p_max > 0.0) || !(p_total > 0.0) || !(noise_power > 0.0))
            fail("powers must be positive");
        if (!(sampling_rate >= 0.0))
            fail("sampling_rate must be >= 0");
        if (!(kappa >= 0.0 && kappa <= 1.0))
            fail("kappa must lie in [0, 1]");
        if (!(pa_efficiency > 0.0 && pa_efficiency <= 1.0))
            fail("pa_efficiency must lie in (0, 1]");
        if (circuit.p_lo < 0.0 || circuit.p_lp < 0.0 || circuit.p_m < 0.0 || circuit.p_h < 0.0)
            fail("circuit powers must be >= 0");
        if (!(smoothing_a > 0.0))
            fail("smoothing_a must be positive");
        if (!(indicator_rho > 0.0))
            fail("indicator_rho must be positive");
        if (!(eps_gpi > 0.0) || !(eps_f > 0.0) || !(eps_tau > 0.0) || !(eps_as > 0.0))
            fail("tolerances must be positive");
        if (t_max < 1 || t_f_max < 1 || t_tau_max < 1 || t_mu_max < 0)
            fail("iteration caps must be >= 1 (t_mu_max >= 0)");
        if (!(delta_gd > 0.0) || !(delta_bm >= 0.0))
            fail("step sizes must be positive");
        if (!(tau_min > 0.0 && tau_min < 1.0))
            fail("tau_min must lie in (0, 1)");
        if (!(armijo_c > 0.0 && armijo_c < 1.0) || armijo_max_halvings < 0)
            fail("invalid Armijo parameters");
    }

    namespace
    {
        // Lloyd-Max MMSE for b = 1..5 on a unit-variance Gaussian. Regenerated by
        // the oracle in tests/oracles/lloyd_max.hpp.
        constexpr std::array<double, 5> lloyd_max_table{
            0.363380227632,
            0.117481847829,
            0.0345477607884,
            0.00950100800807,
            0.00250466835556,
        };
    }

    double distortion_factor(int bits)
    {
        if (bits < 1)
            throw std::invalid_argument("distortion_factor: bits must be >= 1");
        if (bits <= 5)
            return lloyd_max_table[static_cast<std::size_t>(bits - 1)];
        return std::numbers::pi * std::sqrt(3.0) / 2.0 * std::ldexp(1.0, -2 * bits);
    }

    QuantizationProfile QuantizationProfile::from_bits(const std::vector<int> &bits)
    {
        QuantizationProfile p;
        p.bits = bits;
        p.beta.resize(static_cast<Eigen::Index>(bits.size()));
        for (std::size_t i = 0; i < bits.size(); ++i)
        {
            if (bits[i] < 0)
                throw std::invalid_argument("QuantizationProfile: negative bit count");
            p.beta(static_cast<Eigen::Index>(i)) = bits[i] == 0 ? 0.0 : distortion_factor(bits[i]);
        }
        p.alpha = RVec::Ones(p.beta.size()) - p.beta;
        return p;
    }

    QuantizationProfile QuantizationProfile::ideal(std::size_t n)
    {
        QuantizationProfile p;
        p.bits.assign(n, 0);
        p.beta = RVec::Zero(static_cast<Eigen::Index>(n));
        p.alpha = RVec::Ones(static_cast<Eigen::Index>(n));
        return p;
    }

    QuantizationProfile QuantizationProfile::restrict(const AntennaMask &mask) const
    {
        if (mask.size() != bits.size())
            throw std::invalid_argument("QuantizationProfile::restrict: mask size mismatch");
        QuantizationProfile p;
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (mask[i])
                p.bits.push_back(bits[i]);
        p.beta = select_rows(beta, mask);
        p.alpha = select_rows(alpha, mask);
        return p;
    }

    std::vector<int> grouped_bits(int n_antennas, const std::vector<int> &levels)
    {
        if (levels.empty())
            throw std::invalid_argument("grouped_bits: empty level list");
        const int groups = static_cast<int>(levels.size());
        if (n_antennas % groups != 0)
            throw std::invalid_argument("grouped_bits: n_antennas must be a multiple of the number of levels");
        const int per = n_antennas / groups;
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(n_antennas));
        for (int g = 0; g < groups; ++g)
            for (int i = 0; i < per; ++i)
                out.push_back(levels[static_cast<std::size_t>(g)]);
        return out;
    }

    RVec quantization_noise_cov(const CMat &f, double p, const QuantizationProfile &profile)
    {
        if (static_cast<std::size_t>(f.rows()) != profile.size())
            throw std::invalid_argument("quantization_noise_cov: dimension mismatch");
        RVec row_power = f.rowwise().squaredNorm();
        return (profile.alpha.array() * profile.beta.array() * p * row_power.array()).matrix();
    }

    CVec quantize_signal(const CVec &x, const QuantizationProfile &profile, const CVec &noise_draw)
    {
        if (static_cast<std::size_t>(x.size()) != profile.size() || noise_draw.size() != x.size())
            throw std::invalid_argument("quantize_signal: dimension mismatch");
        return (profile.alpha.cast<cplx>().array() * x.array()).matrix() + noise_draw;
    }

    CVec draw_quantization_noise(const RVec &r_q_diag, Rng &rng)
    {
        CVec q(r_q_diag.size());
        for (Eigen::Index i = 0; i < q.size(); ++i)
            q(i) = std::sqrt(r_q_diag(i)) * complex_normal(rng);
        return q;
    }
}
