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
#include "qpcas/harness.hpp"

#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qpcas
{
    using json = nlohmann::json;

    namespace
    {
        bool same(double a, double b)
        {
            return (std::isnan(a) && std::isnan(b)) || a == b;
        }

        std::string fmt(double v)
        {
            if (std::isnan(v))
                return "nan";
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        double parse_double(const std::string &s, std::size_t line, const char *field)
        {
            if (s == "nan")
                return std::numeric_limits<double>::quiet_NaN();
            char *end = nullptr;
            errno = 0;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || *end != '\0' || errno == ERANGE)
                throw std::runtime_error("line " + std::to_string(line) + ": bad number in field " + field);
            return v;
        }

        long long parse_int(const std::string &s, std::size_t line, const char *field)
        {
            char *end = nullptr;
            const long long v = std::strtoll(s.c_str(), &end, 10);
            if (s.empty() || *end != '\0')
                throw std::runtime_error("line " + std::to_string(line) + ": bad integer in field " + field);
            return v;
        }

        double json_number(const json &j)
        {
            return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
        }

        json json_value(double v)
        {
            return std::isnan(v) ? json(nullptr) : json(v);
        }

        std::string slurp(const std::string &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw std::runtime_error("cannot open '" + path + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }
    }

    bool operator==(const TrialRecord &a, const TrialRecord &b)
    {
        return a.seed == b.seed && a.algorithm == b.algorithm && a.n == b.n && a.k == b.k &&
               same(a.p_dbm, b.p_dbm) && same(a.ptot_dbm, b.ptot_dbm) && same(a.kappa, b.kappa) &&
               a.bits == b.bits && same(a.sum_se_lb, b.sum_se_lb) && same(a.common_se, b.common_se) &&
               same(a.private_se, b.private_se) && same(a.sum_se_mc, b.sum_se_mc) &&
               same(a.mc_stderr, b.mc_stderr) && a.n_active == b.n_active && a.active_mask == b.active_mask &&
               same(a.p_tx_w, b.p_tx_w) && same(a.p_cir_w, b.p_cir_w) && same(a.tau, b.tau) &&
               same(a.mu, b.mu) && a.iters_f == b.iters_f && a.iters_mu == b.iters_mu &&
               same(a.wall_ms, b.wall_ms);
    }

    const std::string &csv_header()
    {
        static const std::string h = "seed,algorithm,N,K,P_dBm,Ptot_dBm,kappa,bits,sum_se_lb,common_se,private_se,"
                                     "sum_se_mc,mc_stderr,n_active,active_mask,p_tx_W,p_cir_W,tau,mu,iters_F,"
                                     "iters_mu,wall_ms";
        return h;
    }

    std::string to_csv(const std::vector<TrialRecord> &records)
    {
        std::string out = csv_header() + "\n";
        for (const auto &r : records)
        {
            out += std::to_string(r.seed) + ',' + r.algorithm + ',' + std::to_string(r.n) + ',' +
                   std::to_string(r.k) + ',' + fmt(r.p_dbm) + ',' + fmt(r.ptot_dbm) + ',' + fmt(r.kappa) + ',' +
                   r.bits + ',' + fmt(r.sum_se_lb) + ',' + fmt(r.common_se) + ',' + fmt(r.private_se) + ',' +
                   fmt(r.sum_se_mc) + ',' + fmt(r.mc_stderr) + ',' + std::to_string(r.n_active) + ',' +
                   r.active_mask + ',' + fmt(r.p_tx_w) + ',' + fmt(r.p_cir_w) + ',' + fmt(r.tau) + ',' +
                   fmt(r.mu) + ',' + std::to_string(r.iters_f) + ',' + std::to_string(r.iters_mu) + ',' +
                   fmt(r.wall_ms) + '\n';
        }
        return out;
    }

    std::vector<TrialRecord> parse_csv(const std::string &text)
    {
        std::istringstream in(text);
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error("empty CSV");
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line != csv_header())
            throw std::runtime_error("CSV header mismatch");

        std::vector<TrialRecord> out;
        std::size_t lineno = 1;
        while (std::getline(in, line))
        {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            std::vector<std::string> f;
            std::size_t start = 0;
            for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1)
                f.push_back(line.substr(start, pos - start));
            f.push_back(line.substr(start));
            if (f.size() != 22)
                throw std::runtime_error("line " + std::to_string(lineno) + ": expected 22 fields, got " +
                                         std::to_string(f.size()));
            TrialRecord r;
            r.seed = static_cast<std::uint64_t>(std::strtoull(f[0].c_str(), nullptr, 10));
            r.algorithm = f[1];
            r.n = static_cast<int>(parse_int(f[2], lineno, "N"));
            r.k = static_cast<int>(parse_int(f[3], lineno, "K"));
            r.p_dbm = parse_double(f[4], lineno, "P_dBm");
            r.ptot_dbm = parse_double(f[5], lineno, "Ptot_dBm");
            r.kappa = parse_double(f[6], lineno, "kappa");
            r.bits = f[7];
            r.sum_se_lb = parse_double(f[8], lineno, "sum_se_lb");
            r.common_se = parse_double(f[9], lineno, "common_se");
            r.private_se = parse_double(f[10], lineno, "private_se");
            r.sum_se_mc = parse_double(f[11], lineno, "sum_se_mc");
            r.mc_stderr = parse_double(f[12], lineno, "mc_stderr");
            r.n_active = static_cast<int>(parse_int(f[13], lineno, "n_active"));
            r.active_mask = f[14];
            r.p_tx_w = parse_double(f[15], lineno, "p_tx_W");
            r.p_cir_w = parse_double(f[16], lineno, "p_cir_W");
            r.tau = parse_double(f[17], lineno, "tau");
            r.mu = parse_double(f[18], lineno, "mu");
            r.iters_f = static_cast<int>(parse_int(f[19], lineno, "iters_F"));
            r.iters_mu = static_cast<int>(parse_int(f[20], lineno, "iters_mu"));
            r.wall_ms = parse_double(f[21], lineno, "wall_ms");
            out.push_back(r);
        }
        return out;
    }

    std::string to_json(const std::vector<TrialRecord> &records)
    {
        json arr = json::array();
        for (const auto &r : records)
        {
            json o;
            o["seed"] = r.seed;
            o["algorithm"] = r.algorithm;
            o["N"] = r.n;
            o["K"] = r.k;
            o["P_dBm"] = json_value(r.p_dbm);
            o["Ptot_dBm"] = json_value(r.ptot_dbm);
            o["kappa"] = json_value(r.kappa);
            o["bits"] = r.bits;
            o["sum_se_lb"] = json_value(r.sum_se_lb);
            o["common_se"] = json_value(r.common_se);
            o["private_se"] = json_value(r.private_se);
            o["sum_se_mc"] = json_value(r.sum_se_mc);
            o["mc_stderr"] = json_value(r.mc_stderr);
            o["n_active"] = r.n_active;
            o["active_mask"] = r.active_mask;
            o["p_tx_W"] = json_value(r.p_tx_w);
            o["p_cir_W"] = json_value(r.p_cir_w);
            o["tau"] = json_value(r.tau);
            o["mu"] = json_value(r.mu);
            o["iters_F"] = r.iters_f;
            o["iters_mu"] = r.iters_mu;
            o["wall_ms"] = json_value(r.wall_ms);
            arr.push_back(std::move(o));
        }
        return arr.dump(1) + "\n";
    }

    std::vector<TrialRecord> parse_json(const std::string &text)
    {
        const json arr = json::parse(text);
        if (!arr.is_array())
            throw std::runtime_error("results JSON must be an array");
        std::vector<TrialRecord> out;
        for (const auto &o : arr)
        {
            TrialRecord r;
            r.seed = o.at("seed").get<std::uint64_t>();
            r.algorithm = o.at("algorithm").get<std::string>();
            r.n = o.at("N").get<int>();
            r.k = o.at("K").get<int>();
            r.p_dbm = json_number(o.at("P_dBm"));
            r.ptot_dbm = json_number(o.at("Ptot_dBm"));
            r.kappa = json_number(o.at("kappa"));
            r.bits = o.at("bits").get<std::string>();
            r.sum_se_lb = json_number(o.at("sum_se_lb"));
            r.common_se = json_number(o.at("common_se"));
            r.private_se = json_number(o.at("private_se"));
            r.sum_se_mc = json_number(o.at("sum_se_mc"));
            r.mc_stderr = json_number(o.at("mc_stderr"));
            r.n_active = o.at("n_active").get<int>();
            r.active_mask = o.at("active_mask").get<std::string>();
            r.p_tx_w = json_number(o.at("p_tx_W"));
            r.p_cir_w = json_number(o.at("p_cir_W"));
            r.tau = json_number(o.at("tau"));
            r.mu = json_number(o.at("mu"));
            r.iters_f = o.at("iters_F").get<int>();
            r.iters_mu = o.at("iters_mu").get<int>();
            r.wall_ms = json_number(o.at("wall_ms"));
            out.push_back(r);
        }
        return out;
    }

    std::string emit_results(const std::vector<TrialRecord> &records, const std::string &dir, OutputFormat format)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
        const std::string path =
            (std::filesystem::path(dir) / (format == OutputFormat::csv ? "results.csv" : "results.json")).string();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write '" + path + "'");
        out << (format == OutputFormat::csv ? to_csv(records) : to_json(records));
        out.close();
        if (!out)
            throw std::runtime_error("write failed for '" + path + "'");
        return path;
    }

    std::vector<TrialRecord> read_results(const std::string &path)
    {
        const std::string text = slurp(path);
        try
        {
            if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
                return parse_json(text);
            return parse_csv(text);
        }
        catch (const std::exception &e)
        {
            throw std::runtime_error(path + ": " + e.what());
        }
    }
}
