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
#include "qpcas/rates.hpp"
#include "qpcas/sysmodel.hpp"

#include <random>
#include <vector>

namespace testing_support
{
    using namespace qpcas;

    struct Instance
    {
        ChannelSet channels;
        QuantizationProfile profile;
        double p = 1.0;
        double noise = 0.1;
        double tau = 1.0;
    };

    // Unit pathloss channels with a wider scatterer ring so that the error
    // covariances are well conditioned; noise sets a moderate SNR.
    inline Instance synthetic_instance(int n, int k, double kappa, Rng &rng, bool mixed_bits = true)
    {
        ChannelParams params;
        params.angular_spread_rad = 0.2;
        auto geometry = draw_geometry(k, params, rng);
        for (auto &g : geometry)
            g.pathloss = 1.0;
        Instance inst;
        inst.channels = draw_channels(geometry, n, kappa, params, rng);
        std::vector<int> bits(static_cast<std::size_t>(n), 8);
        if (mixed_bits)
        {
            std::uniform_int_distribution<int> pick(1, 16);
            for (auto &b : bits)
                b = pick(rng);
        }
        inst.profile = QuantizationProfile::from_bits(bits);
        std::uniform_real_distribution<double> u(0.2, 1.0);
        inst.tau = u(rng);
        inst.noise = 0.05 * u(rng);
        return inst;
    }

    inline CMat random_direction(int n, int k, Rng &rng)
    {
        CMat w(n, k + 1);
        for (Eigen::Index i = 0; i < w.size(); ++i)
            w.data()[i] = complex_normal(rng);
        return w / w.norm();
    }

    inline double rel_err(double a, double b)
    {
        return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b)));
    }
}
