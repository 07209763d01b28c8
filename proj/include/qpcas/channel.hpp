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
#include <iosfwd>
#include <string>
#include <vector>

namespace qpcas
{
    // Cell layout and propagation constants for the geometry draw.
    struct ChannelParams
    {
        double cell_radius_m = 1000.0;
        double min_distance_m = 100.0;
        double reference_distance_m = 100.0;
        double pathloss_exponent = 4.0;
        double carrier_hz = 2.4e9;
        double shadowing_std_db = 8.7;
        double angular_spread_rad = 0.0175;  // half-width of the scatterer ring
        double aod_center_range_rad = 1.0471975511965976;  // pi / 3
        double max_aod_difference_rad = 0.1;
    };

    struct UserGeometry
    {
        double distance_m = 0.0;
        double aod_rad = 0.0;
        double shadowing_db = 0.0;
        double pathloss = 0.0;  // linear large-scale gain rho_k
    };

    struct ChannelSet
    {
        CMat h;      // N x K true channels
        CMat h_hat;  // N x K estimates
        std::vector<CMat> r_h;    // rho_k R_g,k
        std::vector<CMat> r_err;  // (2 - 2 sqrt(1 - kappa^2)) r_h
        std::vector<double> r_err_iid_var;
        std::vector<double> pathloss;
        double kappa = 0.0;

        int n_antennas() const { return static_cast<int>(h_hat.rows()); }
        int n_users() const { return static_cast<int>(h_hat.cols()); }

        // Same users, antennas outside the mask removed.
        ChannelSet restrict(const AntennaMask &mask) const;
    };

    // Fraction of channel power left in the estimation error.
    inline double error_power_fraction(double kappa)
    {
        return 2.0 - 2.0 * std::sqrt(1.0 - kappa * kappa);
    }

    inline double iid_error_variance(double pathloss, double kappa)
    {
        if (kappa < 0.0 || kappa > 1.0)
            throw std::invalid_argument("iid_error_variance: kappa outside [0, 1]");
        return pathloss * error_power_fraction(kappa);
    }

    // Gauss-Legendre nodes and weights on [-1, 1].
    void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights);

    // One-ring covariance of a half-wavelength ULA with scatterers uniform over
    // [aod - spread, aod + spread]. Unit diagonal, Hermitian Toeplitz.
    CMat one_ring_covariance(double aod_rad, double angular_spread_rad, int n, int quadrature_nodes = 200);

    // Log-distance pathloss in dB, free-space reference at reference_distance_m.
    double pathloss_db(double distance_m, double shadowing_db, const ChannelParams &params);

    std::vector<UserGeometry> draw_geometry(int n_users, const ChannelParams &params, Rng &rng);

    ChannelSet draw_channels(const std::vector<UserGeometry> &geometry, int n_antennas, double kappa,
                             const ChannelParams &params, Rng &rng);

    // Factor L with L L^H = R for a Hermitian PSD matrix (eigenvalues clipped at 0).
    CMat psd_factor(const CMat &r);

    // Draws of the true channel given the estimate: h = h_hat + R_err^{1/2} z.
    class ConditionalSampler
    {
    public:
        explicit ConditionalSampler(const ChannelSet &channels);
        CMat draw(Rng &rng) const;

    private:
        const ChannelSet *channels_;
        std::vector<CMat> factors_;
    };

    // Plain-text fixture format. Covariances are stored as r_h; r_err is
    // rebuilt from kappa on load.
    void save_channels_csv(const ChannelSet &channels, std::uint64_t seed, const std::string &path);
    ChannelSet load_channels_csv(const std::string &path, std::uint64_t *seed = nullptr);
}
