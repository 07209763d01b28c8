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
#include "qpcas/optimizer.hpp"

#include "qpcas/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qpcas
{
    DirectionResult solve_direction(const CMat &w0, const RateMatrices &m, const PowerModel &pm,
                                    const LagrangianSettings &s, const SystemConfig &cfg, SolverPath path)
    {
        const double n0 = w0.norm();
        if (!(n0 > 0.0))
            throw std::invalid_argument("solve_direction: zero starting direction");

        DirectionResult r;
        r.w = w0 / n0;
        r.step_norm = std::numeric_limits<double>::infinity();
        while (r.iterations < cfg.t_max)
        {
            const KktWeights kw = kkt_weights(r.w, m, pm, s);
            CMat next = gpi_step(kw, m, r.w, path);
            if (!s.with_common)
            {
                next.col(0).setZero();
                next /= next.norm();
            }
            r.step_norm = (next - r.w).norm();
            r.w = std::move(next);
            ++r.iterations;
            if (r.step_norm <= cfg.eps_gpi)
            {
                r.converged = true;
                break;
            }
        }
        return r;
    }

    // -- tau ------------------------------------------------------------------

    TauObjective::TauObjective(const CMat &w, const RateMatrices &m, const PowerModel &pm,
                               const LagrangianSettings &s)
    {
        const QuadForms q = evaluate_quadratics(m, w);
        w_norm2_ = w.squaredNorm();
        const double r0 = m.ridge() * w_norm2_;
        base_num_c_ = (q.num_c.array() - r0).matrix();
        base_den_c_ = (q.den_c.array() - r0).matrix();
        base_num_p_ = (q.num_p.array() - r0).matrix();
        base_den_p_ = (q.den_p.array() - r0).matrix();
        sig_c_ = q.signal.col(0);
        sig_p_.resize(m.k);
        for (int k = 0; k < m.k; ++k)
            sig_p_(k) = q.signal(k, k + 1);
        noise_over_p_ = m.noise / m.p;
        p_ = m.p;
        pa_efficiency_ = pm.pa_efficiency;
        mu_ = s.mu;
        a_ = s.a;
        with_common_ = s.with_common;
        constant_ = -s.mu * (pm.p_lo + smooth_antenna_power(w, m.alpha, pm, s.rho) - s.p_total);
    }

    double TauObjective::value(double tau) const
    {
        const double r = noise_over_p_ * w_norm2_ / tau;
        const double ln2 = std::log(2.0);
        double l1 = 0.0;
        if (with_common_)
        {
            const RVec rc = (((base_num_c_.array() + r) / (base_den_c_.array() + r)).log() / ln2).matrix();
            l1 = logsumexp_softmin(rc, a_);
        }
        const double l2 = (((base_num_p_.array() + r) / (base_den_p_.array() + r)).log() / ln2).sum();
        return l1 + l2 - mu_ * tau * p_ / pa_efficiency_ + constant_;
    }

    double TauObjective::gradient(double tau) const
    {
        const double r = noise_over_p_ * w_norm2_ / tau;
        const double scale = noise_over_p_ * w_norm2_ / (tau * tau * std::log(2.0));
        double g1 = 0.0;
        if (with_common_)
        {
            const RVec xi1 = (base_den_c_.array() + r).matrix();
            const RVec rc = (((base_num_c_.array() + r) / xi1.array()).log() / std::log(2.0)).matrix();
            const RVec psi = softmin_weights(rc, a_);
            g1 = (psi.array() * sig_c_.array() / (xi1.array() * (xi1.array() + sig_c_.array()))).sum();
        }
        const RVec xi2 = (base_den_p_.array() + r).matrix();
        const double g2 = (sig_p_.array() / (xi2.array() * (xi2.array() + sig_p_.array()))).sum();
        return scale * (g1 + g2) - mu_ * p_ / pa_efficiency_;
    }

    double tau_gradient(const CMat &w, const RateMatrices &m, const PowerModel &pm, const LagrangianSettings &s)
    {
        return TauObjective(w, m, pm, s).gradient(m.tau);
    }

    TauResult solve_tau(double tau0, const CMat &w, const RateMatrices &m, const PowerModel &pm,
                        const LagrangianSettings &s, const SystemConfig &cfg)
    {
        const TauObjective obj(w, m, pm, s);
        auto clamp = [&](double t) { return std::clamp(t, cfg.tau_min, 1.0); };

        TauResult r;
        double tau = clamp(tau0);
        while (r.iterations < cfg.t_tau_max)
        {
            ++r.iterations;
            const double g = obj.gradient(tau);
            const double l0 = obj.value(tau);
            double step = cfg.delta_gd;
            double next = tau;
            bool accepted = false;
            for (int h = 0; h <= cfg.armijo_max_halvings; ++h)
            {
                next = clamp(tau + step * g);
                if (next == tau)
                    break;
                if (obj.value(next) >= l0 + cfg.armijo_c * g * (next - tau))
                {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted)
            {
                r.converged = true;
                break;
            }
            const double rel = std::abs(next - tau) / tau;
            tau = next;
            if (rel <= cfg.eps_tau)
            {
                r.converged = true;
                break;
            }
        }
        r.tau = tau;
        return r;
    }

    // -- selection and multiplier ---------------------------------------------

    AntennaMask select_antennas(const CMat &w, const RVec &alpha, double eps_as)
    {
        const RVec g = row_gains(w, alpha);
        const double gmax = g.maxCoeff();
        if (!(gmax > 0.0))
            throw std::invalid_argument("select_antennas: all-zero precoder");
        AntennaMask mask(static_cast<std::size_t>(g.size()));
        for (Eigen::Index i = 0; i < g.size(); ++i)
            mask[static_cast<std::size_t>(i)] = g(i) / gmax >= eps_as;
        return mask;
    }

    std::pair<double, double> update_mu_bisection(double mu, double delta, bool feasible)
    {
        const double next = feasible ? std::max(0.0, mu - delta) : std::max(0.0, mu + delta);
        return {next, delta / 2.0};
    }

    int PrecoderSolution::median_iters_f() const
    {
        if (rounds.empty())
            return 0;
        std::vector<int> v;
        for (const auto &r : rounds)
            v.push_back(r.iters_f);
        std::sort(v.begin(), v.end());
        return v[(v.size() - 1) / 2];
    }

    // -- joint solver -----------------------------------------------------------

    CMat initial_direction(const ChannelSet &channels, const QuantizationProfile &profile,
                           const SystemConfig &cfg, bool with_common)
    {
        const CMat f0 = qrzf_precoder(channels.h_hat, profile, cfg.p_max, cfg.noise_power, with_common);
        CMat w = direction_from_precoder(f0, profile.alpha, 1.0);
        return w / w.norm();
    }

    namespace
    {
        // Problem restricted to the currently active antennas.
        struct ActiveProblem
        {
            std::vector<std::size_t> index;  // full-array index of each active row
            ChannelSet channels;
            QuantizationProfile profile;
            PowerModel power;
            RateMatrices matrices;
        };

        ActiveProblem make_active(const ChannelSet &ch, const QuantizationProfile &prof, const PowerModel &pm,
                                  const AntennaMask &mask, const SystemConfig &cfg, double tau, bool iid)
        {
            ActiveProblem a;
            for (std::size_t i = 0; i < mask.size(); ++i)
                if (mask[i])
                    a.index.push_back(i);
            a.channels = ch.restrict(mask);
            a.profile = prof.restrict(mask);
            a.power = pm.restrict(mask);
            a.matrices = assemble_rate_matrices(a.channels, a.profile, tau, cfg.p_max, cfg.noise_power, iid);
            return a;
        }

        AntennaMask lift_mask(const ActiveProblem &a, const AntennaMask &local, std::size_t n)
        {
            AntennaMask full(n, false);
            for (std::size_t j = 0; j < local.size(); ++j)
                if (local[j])
                    full[a.index[j]] = true;
            return full;
        }

        double budget_slack_tau(double p_total, double p_cir, const SystemConfig &cfg)
        {
            return cfg.pa_efficiency / cfg.p_max * (p_total - p_cir);
        }
    }

    PrecoderSolution solve_qpcas(const ChannelSet &channels, const QuantizationProfile &profile,
                           const SystemConfig &cfg, const QpcasOptions &opt)
    {
        cfg.validate();
        const std::size_t n = profile.size();
        if (static_cast<std::size_t>(channels.n_antennas()) != n)
            throw std::invalid_argument("qpcas: channel and profile sizes differ");

        const PowerModel pm_full = PowerModel::make(profile, cfg);
        const double cheapest = pm_full.p_ant.minCoeff();
        if (!(cfg.p_total > pm_full.p_lo + cheapest + cfg.tau_min * cfg.p_max / cfg.pa_efficiency))
            throw InfeasibleBudget("power budget below local oscillator plus the cheapest antenna");

        const SolverPath path = opt.low_complexity ? SolverPath::sherman_morrison : SolverPath::dense;
        LagrangianSettings ls;
        ls.a = cfg.smoothing_a;
        ls.rho = cfg.indicator_rho;
        ls.p_total = cfg.p_total;
        ls.with_common = opt.with_common;

        AntennaMask active(n, true);
        double tau = 1.0;
        double mu = 0.0;
        double delta = cfg.delta_bm;
        ActiveProblem ap = make_active(channels, profile, pm_full, active, cfg, tau, opt.low_complexity);
        CMat w = initial_direction(channels, profile, cfg, opt.with_common);

        PrecoderSolution sol;
        for (int tm = 0; tm < cfg.t_mu_max; ++tm)
        {
            RoundTrace rt;
            rt.mu = mu;
            ls.mu = mu;

            CMat f_prev = precoder_from_direction(w, ap.profile.alpha, tau);
            while (rt.iters_f < cfg.t_f_max)
            {
                ap.matrices.set_tau(tau);
                tau = solve_tau(tau, w, ap.matrices, ap.power, ls, cfg).tau;
                ap.matrices.set_tau(tau);
                w = solve_direction(w, ap.matrices, ap.power, ls, cfg, path).w;

                const CMat f = precoder_from_direction(w, ap.profile.alpha, tau);
                const double change = (f - f_prev).norm() / f_prev.norm();
                rt.f_change.push_back(change);
                ++rt.iters_f;
                f_prev = f;
                if (change <= cfg.eps_f)
                    break;
            }

            const AntennaMask keep = select_antennas(w, ap.profile.alpha, cfg.eps_as);
            if (count_active(keep) < keep.size())
            {
                active = lift_mask(ap, keep, n);
                w = select_rows(w, keep);
                w /= w.norm();
                ap = make_active(channels, profile, pm_full, active, cfg, tau, opt.low_complexity);
            }

            const double p_cir = cfg.feasibility == FeasibilityMode::smooth
                                     ? ap.power.p_lo + smooth_antenna_power(w, ap.profile.alpha, ap.power, cfg.indicator_rho)
                                     : circuit_power(ap.power);
            rt.feasible = total_consumption(tau * cfg.p_max, p_cir, cfg.pa_efficiency) <= cfg.p_total;
            rt.tau = tau;
            rt.n_active = static_cast<int>(count_active(active));
            rt.sum_se = rates_from_quadratics(evaluate_quadratics(ap.matrices, w)).sum();
            sol.rounds.push_back(rt);

            std::tie(mu, delta) = update_mu_bisection(mu, delta, rt.feasible);
            ++sol.iters_mu;
        }

        // Largest tau the selected set can afford; drop the weakest antennas if
        // the circuit alone leaves no room.
        while (budget_slack_tau(cfg.p_total, circuit_power(ap.power), cfg) < cfg.tau_min)
        {
            const RVec g = row_gains(w, ap.profile.alpha);
            AntennaMask keep(static_cast<std::size_t>(g.size()), true);
            if (g.size() > 1)
            {
                Eigen::Index weakest = 0;
                g.minCoeff(&weakest);
                keep[static_cast<std::size_t>(weakest)] = false;
                active = lift_mask(ap, keep, n);
                w = select_rows(w, keep);
            }
            else
            {
                // Only the cheapest antenna is guaranteed to fit.
                Eigen::Index cheap = 0;
                pm_full.p_ant.minCoeff(&cheap);
                active.assign(n, false);
                active[static_cast<std::size_t>(cheap)] = true;
                w = CMat::Ones(1, channels.n_users() + 1);
                if (!opt.with_common)
                    w.col(0).setZero();
            }
            w /= w.norm();
            ap = make_active(channels, profile, pm_full, active, cfg, tau, opt.low_complexity);
        }

        tau = std::clamp(budget_slack_tau(cfg.p_total, circuit_power(ap.power), cfg), cfg.tau_min, 1.0);
        ap.matrices.set_tau(tau);
        ls.mu = 0.0;
        const DirectionResult fin = solve_direction(w, ap.matrices, ap.power, ls, cfg, path);

        sol.tau = tau;
        sol.mu = mu;
        sol.active = active;
        sol.final_gpi_iters = fin.iterations;
        sol.final_gpi_converged = fin.converged;
        sol.w = expand_rows(fin.w, active);
        sol.f = precoder_from_direction(sol.w, profile.alpha, tau);
        return sol;
    }
}
