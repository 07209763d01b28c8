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
#include "qpcas/power.hpp"

#include <cmath>
#include <stdexcept>

namespace qpcas
{
    double dac_power(int bits, double sampling_rate)
    {
        if (bits < 1)
            throw std::invalid_argument("dac_power: bits must be >= 1");
        return 1.5e-5 * std::ldexp(1.0, bits) + 9e-12 * sampling_rate * bits;
    }

    PowerModel PowerModel::make(const QuantizationProfile &profile, const SystemConfig &cfg)
    {
        PowerModel m;
        m.p_lo = cfg.circuit.p_lo;
        m.pa_efficiency = cfg.pa_efficiency;
        m.p_ant.resize(static_cast<Eigen::Index>(profile.size()));
        const double prf = rf_power(cfg.circuit);
        for (std::size_t i = 0; i < profile.size(); ++i)
        {
            // Ideal DACs are charged as free.
            const int b = profile.bits[i];
            const double dac = b > 0 ? dac_power(b, cfg.sampling_rate) : 0.0;
            m.p_ant(static_cast<Eigen::Index>(i)) = 2.0 * dac + prf;
        }
        return m;
    }

    PowerModel PowerModel::restrict(const AntennaMask &mask) const
    {
        if (mask.size() != size())
            throw std::invalid_argument("PowerModel::restrict: mask size mismatch");
        PowerModel m = *this;
        m.p_ant = select_rows(p_ant, mask);
        return m;
    }

    double circuit_power(const AntennaMask &mask, const PowerModel &model)
    {
        if (mask.size() != model.size())
            throw std::invalid_argument("circuit_power: mask size mismatch");
        double p = model.p_lo;
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (mask[i])
                p += model.p_ant(static_cast<Eigen::Index>(i));
        return p;
    }

    double circuit_power(const PowerModel &model)
    {
        return model.p_lo + model.p_ant.sum();
    }

    RVec row_gains(const CMat &w, const RVec &alpha)
    {
        return (w.rowwise().squaredNorm().array() / alpha.array()).matrix();
    }

    RVec e_quadratics(const CMat &w, const RVec &alpha, double rho)
    {
        const double norm2 = w.squaredNorm();
        return (norm2 + row_gains(w, alpha).array() / rho).matrix();
    }

    double smooth_antenna_power(const CMat &w, const RVec &alpha, const PowerModel &model, double rho)
    {
        const RVec q = e_quadratics(w, alpha, rho);
        const double scale = std::log(2.0) * std::log2(1.0 + 1.0 / rho);
        double s = 0.0;
        for (Eigen::Index i = 0; i < q.size(); ++i)
            s += model.p_ant(i) * std::log(q(i));
        return s / scale;
    }

    double transmit_power(double tau, double p_max)
    {
        if (!(tau > 0.0 && tau <= 1.0))
            throw std::invalid_argument("transmit_power: tau outside (0, 1]");
        return tau * p_max;
    }
}
