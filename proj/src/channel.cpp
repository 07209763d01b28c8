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
#include "qpcas/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qpcas
{
    ChannelSet ChannelSet::restrict(const AntennaMask &mask) const
    {
        if (mask.size() != static_cast<std::size_t>(n_antennas()))
            throw std::invalid_argument("ChannelSet::restrict: mask size mismatch");
        std::vector<Eigen::Index> idx;
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (mask[i])
                idx.push_back(static_cast<Eigen::Index>(i));

        auto sub = [&](const CMat &m)
        {
            CMat out(idx.size(), idx.size());
            for (std::size_t a = 0; a < idx.size(); ++a)
                for (std::size_t b = 0; b < idx.size(); ++b)
                    out(a, b) = m(idx[a], idx[b]);
            return out;
        };

        ChannelSet out;
        out.h = select_rows(h, mask);
        out.h_hat = select_rows(h_hat, mask);
        for (const auto &r : r_h)
            out.r_h.push_back(sub(r));
        for (const auto &r : r_err)
            out.r_err.push_back(sub(r));
        out.r_err_iid_var = r_err_iid_var;
        out.pathloss = pathloss;
        out.kappa = kappa;
        return out;
    }

    namespace
    {
        // P_n(x) and P_n'(x) by the three-term recurrence.
        void legendre(int n, double x, double &p, double &dp)
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k)
            {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            p = p1;
            dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        }
    }

    void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights)
    {
        if (n < 1)
            throw std::invalid_argument("gauss_legendre: n must be >= 1");
        nodes.assign(static_cast<std::size_t>(n), 0.0);
        weights.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < (n + 1) / 2; ++i)
        {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double p = 0.0, dp = 0.0;
            for (int it = 0; it < 100; ++it)
            {
                legendre(n, x, p, dp);
                const double dx = p / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15)
                    break;
            }
            legendre(n, x, p, dp);
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[static_cast<std::size_t>(i)] = -x;
            nodes[static_cast<std::size_t>(n - 1 - i)] = x;
            weights[static_cast<std::size_t>(i)] = w;
            weights[static_cast<std::size_t>(n - 1 - i)] = w;
        }
    }

    CMat one_ring_covariance(double aod_rad, double angular_spread_rad, int n, int quadrature_nodes)
    {
        if (!(angular_spread_rad > 0.0))
            throw std::invalid_argument("one_ring_covariance: spread must be positive");
        if (n < 1)
            throw std::invalid_argument("one_ring_covariance: n must be >= 1");

        std::vector<double> x, w;
        gauss_legendre(quadrature_nodes, x, w);

        // r_d = (1 / 2D) int exp(j pi d sin phi) dphi, phi = aod + D x.
        std::vector<cplx> r(static_cast<std::size_t>(n), cplx(0.0));
        for (std::size_t q = 0; q < x.size(); ++q)
        {
            const double s = std::sin(aod_rad + angular_spread_rad * x[q]);
            for (int d = 0; d < n; ++d)
                r[static_cast<std::size_t>(d)] += 0.5 * w[q] * std::polar(1.0, std::numbers::pi * d * s);
        }
        r[0] = 1.0;

        CMat cov(n, n);
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k)
                cov(m, k) = (m >= k) ? r[static_cast<std::size_t>(m - k)] : std::conj(r[static_cast<std::size_t>(k - m)]);
        return cov;
    }

    double pathloss_db(double distance_m, double shadowing_db, const ChannelParams &params)
    {
        const double c = 299792458.0;
        const double d0 = params.reference_distance_m;
        const double pl0 = 20.0 * std::log10(4.0 * std::numbers::pi * d0 * params.carrier_hz / c);
        return pl0 + 10.0 * params.pathloss_exponent * std::log10(distance_m / d0) + shadowing_db;
    }

    std::vector<UserGeometry> draw_geometry(int n_users, const ChannelParams &params, Rng &rng)
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> shadow(0.0, params.shadowing_std_db);

        const double theta0 = (2.0 * unit(rng) - 1.0) * params.aod_center_range_rad;
        const double r0 = params.min_distance_m * params.min_distance_m;
        const double r1 = params.cell_radius_m * params.cell_radius_m;

        std::vector<UserGeometry> users(static_cast<std::size_t>(n_users));
        for (auto &u : users)
        {
            // Uniform over the annulus area.
            u.distance_m = std::sqrt(r0 + (r1 - r0) * unit(rng));
            u.aod_rad = theta0 + params.max_aod_difference_rad * unit(rng);
            u.shadowing_db = shadow(rng);
            u.pathloss = std::pow(10.0, -pathloss_db(u.distance_m, u.shadowing_db, params) / 10.0);
        }
        return users;
    }

    CMat psd_factor(const CMat &r)
    {
        Eigen::SelfAdjointEigenSolver<CMat> es(r);
        RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return es.eigenvectors() * ev.asDiagonal();
    }

    ChannelSet draw_channels(const std::vector<UserGeometry> &geometry, int n_antennas, double kappa,
                             const ChannelParams &params, Rng &rng)
    {
        if (kappa < 0.0 || kappa > 1.0)
            throw std::invalid_argument("draw_channels: kappa outside [0, 1]");
        const int k_users = static_cast<int>(geometry.size());
        const double keep = std::sqrt(1.0 - kappa * kappa);
        const double frac = error_power_fraction(kappa);

        ChannelSet cs;
        cs.kappa = kappa;
        cs.h.resize(n_antennas, k_users);
        cs.h_hat.resize(n_antennas, k_users);
        for (int k = 0; k < k_users; ++k)
        {
            const auto &g = geometry[static_cast<std::size_t>(k)];
            const CMat r = g.pathloss * one_ring_covariance(g.aod_rad, params.angular_spread_rad, n_antennas);
            const CMat l = psd_factor(r);
            const CVec hk = l * complex_normal_vector(n_antennas, rng);
            const CVec qk = kappa * (l * complex_normal_vector(n_antennas, rng));
            cs.h.col(k) = hk;
            cs.h_hat.col(k) = keep * hk + qk;
            cs.r_h.push_back(r);
            cs.r_err.push_back(frac * r);
            cs.r_err_iid_var.push_back(iid_error_variance(g.pathloss, kappa));
            cs.pathloss.push_back(g.pathloss);
        }
        return cs;
    }

    ConditionalSampler::ConditionalSampler(const ChannelSet &channels) : channels_(&channels)
    {
        for (const auto &r : channels.r_err)
            factors_.push_back(psd_factor(r));
    }

    CMat ConditionalSampler::draw(Rng &rng) const
    {
        CMat h = channels_->h_hat;
        const Eigen::Index n = h.rows();
        for (Eigen::Index k = 0; k < h.cols(); ++k)
            h.col(k) += factors_[static_cast<std::size_t>(k)] * complex_normal_vector(n, rng);
        return h;
    }

    namespace
    {
        void put(std::ostream &os, const char *tag, int a, int b, cplx v)
        {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g,%.17g\n", tag, a, b, v.real(), v.imag());
            os << buf;
        }
    }

    void save_channels_csv(const ChannelSet &cs, std::uint64_t seed, const std::string &path)
    {
        std::ofstream os(path);
        if (!os)
            throw std::runtime_error("cannot open channel file for writing: " + path);
        const int n = cs.n_antennas(), k_users = cs.n_users();
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.17g", cs.kappa);
        os << "N,K,seed,kappa\n" << n << ',' << k_users << ',' << seed << ',' << buf << '\n';
        os << "tag,a,b,re,im\n";
        for (int k = 0; k < k_users; ++k)
            put(os, "pathloss", k, 0, cs.pathloss[static_cast<std::size_t>(k)]);
        for (int k = 0; k < k_users; ++k)
            for (int i = 0; i < n; ++i)
                put(os, "h", i, k, cs.h(i, k));
        for (int k = 0; k < k_users; ++k)
            for (int i = 0; i < n; ++i)
                put(os, "h_hat", i, k, cs.h_hat(i, k));
        for (int k = 0; k < k_users; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    put(os, ("r_h" + std::to_string(k)).c_str(), i, j, cs.r_h[static_cast<std::size_t>(k)](i, j));
        if (!os)
            throw std::runtime_error("write failed: " + path);
    }

    ChannelSet load_channels_csv(const std::string &path, std::uint64_t *seed)
    {
        std::ifstream is(path);
        if (!is)
            throw std::runtime_error("cannot open channel file: " + path);
        std::string line;
        std::getline(is, line);
        if (line != "N,K,seed,kappa")
            throw std::runtime_error("bad channel file header: " + path);
        std::getline(is, line);
        int n = 0, k_users = 0;
        unsigned long long s = 0;
        double kappa = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%llu,%lf", &n, &k_users, &s, &kappa) != 4 || n < 1 || k_users < 1)
            throw std::runtime_error("bad channel file dimensions: " + path);
        if (seed)
            *seed = s;
        std::getline(is, line);

        ChannelSet cs;
        cs.kappa = kappa;
        cs.h = CMat::Zero(n, k_users);
        cs.h_hat = CMat::Zero(n, k_users);
        cs.r_h.assign(static_cast<std::size_t>(k_users), CMat::Zero(n, n));
        cs.pathloss.assign(static_cast<std::size_t>(k_users), 0.0);
        while (std::getline(is, line))
        {
            if (line.empty())
                continue;
            char tag[32];
            int a = 0, b = 0;
            double re = 0.0, im = 0.0;
            if (std::sscanf(line.c_str(), "%31[^,],%d,%d,%lf,%lf", tag, &a, &b, &re, &im) != 5)
                throw std::runtime_error("malformed channel row in " + path + ": " + line);
            const std::string t(tag);
            if (t == "pathloss" && a >= 0 && a < k_users)
                cs.pathloss[static_cast<std::size_t>(a)] = re;
            else if (t == "h" && a >= 0 && a < n && b >= 0 && b < k_users)
                cs.h(a, b) = {re, im};
            else if (t == "h_hat" && a >= 0 && a < n && b >= 0 && b < k_users)
                cs.h_hat(a, b) = {re, im};
            else if (t.rfind("r_h", 0) == 0)
            {
                const int k = std::stoi(t.substr(3));
                if (k < 0 || k >= k_users || a < 0 || a >= n || b < 0 || b >= n)
                    throw std::runtime_error("channel row out of range in " + path);
                cs.r_h[static_cast<std::size_t>(k)](a, b) = {re, im};
            }
            else
                throw std::runtime_error("unknown channel row in " + path + ": " + line);
        }
        const double frac = error_power_fraction(kappa);
        for (int k = 0; k < k_users; ++k)
        {
            cs.r_err.push_back(frac * cs.r_h[static_cast<std::size_t>(k)]);
            cs.r_err_iid_var.push_back(cs.pathloss[static_cast<std::size_t>(k)] * frac);
        }
        return cs;
    }
}
