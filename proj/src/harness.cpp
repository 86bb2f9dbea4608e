// SPDX-License-Identifier: Apache-2.0
//
// qmimo: energy-efficient precoding for quantized massive MIMO downlink
// Copyright (C) 2026 The qmimo authors
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
#include "qmimo/harness.hpp"
#include "qmimo/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#ifndef QMIMO_VERSION
#define QMIMO_VERSION "unknown"
#endif

namespace qmimo
{

namespace
{
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string selection_field(const std::map<unsigned, std::pair<int, int>> &sel)
{
    std::string s;
    for (const auto &[bits, count] : sel)
    {
        if (!s.empty())
            s += ';';
        s += std::to_string(bits) + ":" + std::to_string(count.first) + "/" + std::to_string(count.second);
    }
    return s;
}

ResultRow solve_one(PrecoderKind kind, const arma::cx_mat &H, const QuantizationProfile &profile, double p_dbm,
                    double sigma2, const ExperimentConfig &cfg)
{
    ResultRow row;
    row.algorithm = to_string(kind);
    row.p_dbm = p_dbm;

    const auto t0 = std::chrono::steady_clock::now();
    try
    {
        const SolveReport rep = run_precoder(kind, H, profile, dbm_to_watt(p_dbm), sigma2, cfg.power, cfg.settings);
        row.sum_se = rep.breakdown.sum_se;
        row.ee = rep.breakdown.ee;
        row.tx_power_w = rep.breakdown.p_tx;
        row.n_active = int(rep.active_set.size());
        row.outer = rep.loops.outer;
        row.middle = rep.loops.middle;
        row.inner = rep.loops.inner;
        row.gpi = rep.loops.gpi;
        row.converged = rep.converged;

        const auto &bits = profile.dac_bits();
        for (unsigned b : bits)
            row.selection[b].second++;
        for (arma::uword n : rep.active_set)
            row.selection[bits[n]].first++;
    }
    catch (const SolverError &e)
    {
        row.sum_se = row.ee = row.tx_power_w = nan;
        row.converged = false;
        row.status = std::string("diverged: ") + e.what();
    }
    catch (const PreconditionError &e)
    {
        row.sum_se = row.ee = row.tx_power_w = nan;
        row.converged = false;
        row.status = std::string("failed: ") + e.what();
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::vector<ResultRow> run_trial(const ExperimentConfig &cfg, int trial)
{
    std::vector<ResultRow> rows;
    const std::uint64_t seed = derive_seed(cfg.master_seed, {std::uint64_t(trial)});
    const double sigma2 = noise_power_w(cfg.geometry);

    for (arma::uword N : cfg.n_antennas)
        for (arma::uword K : cfg.n_users)
        {
            const ChannelRealization ch =
                generate_channel(cfg.geometry, N, K, derive_seed(seed, {1, N, K}), cfg.channel_model);
            for (std::size_t di = 0; di < cfg.dac_bits.size(); ++di)
                for (std::size_t ai = 0; ai < cfg.adc_bits.size(); ++ai)
                {
                    std::mt19937_64 rng(derive_seed(seed, {2, N, K, di, ai}));
                    auto dac = cfg.dac_bits[di].draw(N, rng);
                    auto adc = cfg.adc_bits[ai].draw(K, rng);
                    const auto profile = QuantizationProfile::from_bits(std::move(dac), std::move(adc));

                    for (double p : cfg.p_dbm)
                        for (PrecoderKind kind : cfg.algorithms)
                        {
                            ResultRow row = solve_one(kind, ch.H, profile, p, sigma2, cfg);
                            row.trial = trial;
                            row.seed = seed;
                            row.n_antennas = N;
                            row.n_users = K;
                            row.dac_bits = cfg.dac_bits[di].label();
                            row.adc_bits = cfg.adc_bits[ai].label();
                            rows.push_back(std::move(row));
                        }
                }
        }
    return rows;
}

std::string group_value(const ResultRow &r, const std::string &key)
{
    if (key == "algorithm")
        return r.algorithm;
    if (key == "p_dbm")
        return fmt(r.p_dbm);
    if (key == "n_antennas")
        return std::to_string(r.n_antennas);
    if (key == "n_users")
        return std::to_string(r.n_users);
    if (key == "dac_bits")
        return r.dac_bits;
    if (key == "adc_bits")
        return r.adc_bits;
    throw std::invalid_argument("emit_plotdata: unknown group-by key '" + key + "'");
}
} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
    std::vector<std::uint32_t> words{std::uint32_t(master), std::uint32_t(master >> 32)};
    for (auto p : path)
    {
        words.push_back(std::uint32_t(p));
        words.push_back(std::uint32_t(p >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (std::uint64_t(out[1]) << 32) | out[0];
}

void ResultTable::write_csv(std::ostream &out, bool with_runtime) const
{
    out << "trial,seed,n_antennas,n_users,dac_bits,adc_bits,algorithm,p_dbm,sum_se,ee,tx_power_w,n_active,"
           "selection,outer_iters,middle_iters,inner_iters,gpi_iters,converged,status";
    if (with_runtime)
        out << ",runtime_ms";
    out << '\n';
    for (const auto &r : rows)
    {
        out << r.trial << ',' << r.seed << ',' << r.n_antennas << ',' << r.n_users << ',' << csv_field(r.dac_bits)
            << ',' << csv_field(r.adc_bits) << ',' << r.algorithm << ',' << fmt(r.p_dbm) << ',' << fmt(r.sum_se)
            << ',' << fmt(r.ee) << ',' << fmt(r.tx_power_w) << ',' << r.n_active << ','
            << csv_field(selection_field(r.selection)) << ',' << r.outer << ',' << r.middle << ',' << r.inner << ','
            << r.gpi << ',' << (r.converged ? 1 : 0) << ',' << csv_field(r.status);
        if (with_runtime)
            out << ',' << fmt(r.runtime_ms);
        out << '\n';
    }
}

ResultTable run_experiment(const ExperimentConfig &config, unsigned threads)
{
    config.validate();
    const int T = config.trials;
    std::vector<std::vector<ResultRow>> per_trial(T);
    std::vector<std::string> errors(T);

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < T; t = next++)
        {
            try
            {
                per_trial[t] = run_trial(config, t);
            }
            catch (const std::exception &e)
            {
                errors[t] = e.what();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, unsigned(T)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto &th : pool)
        th.join();

    ResultTable table;
    for (int t = 0; t < T; ++t)
    {
        if (!errors[t].empty())
            throw std::runtime_error("trial " + std::to_string(t) + ": " + errors[t]);
        table.trial_seeds.push_back(derive_seed(config.master_seed, {std::uint64_t(t)}));
        for (auto &r : per_trial[t])
        {
            if (r.status != "ok")
                ++table.failures;
            table.rows.push_back(std::move(r));
        }
    }
    return table;
}

std::string config_sha256(const ExperimentConfig &config)
{
    const std::string text = dump_config(config);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 computation failed");
    static const char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i)
    {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

void write_results(const ResultTable &table, const ExperimentConfig &config, const std::string &path)
{
    std::ofstream csv(path, std::ios::binary);
    if (!csv)
        throw std::runtime_error("cannot write results to '" + path + "'");
    table.write_csv(csv, config.record_runtime);
    if (!csv)
        throw std::runtime_error("error while writing '" + path + "'");

    nlohmann::json meta;
    meta["config_sha256"] = config_sha256(config);
    meta["version"] = QMIMO_VERSION;
    meta["master_seed"] = config.master_seed;
    meta["trial_seeds"] = table.trial_seeds;
    meta["rows"] = table.rows.size();
    meta["failures"] = table.failures;
    meta["config"] = nlohmann::json::parse(dump_config(config));

    const std::string meta_path = path + ".meta.json";
    std::ofstream m(meta_path, std::ios::binary);
    if (!m)
        throw std::runtime_error("cannot write metadata to '" + meta_path + "'");
    m << meta.dump(2) << '\n';
}

const std::vector<std::string> &default_group_keys()
{
    static const std::vector<std::string> keys{"algorithm", "n_antennas", "n_users", "dac_bits", "adc_bits",
                                               "p_dbm"};
    return keys;
}

std::pair<double, double> mean_stderr(const std::vector<double> &x)
{
    if (x.empty())
        return {nan, nan};
    double m = 0.0;
    for (double v : x)
        m += v;
    m /= double(x.size());
    if (x.size() < 2)
        return {m, 0.0};
    double ss = 0.0;
    for (double v : x)
        ss += (v - m) * (v - m);
    return {m, std::sqrt(ss / double(x.size() - 1) / double(x.size()))};
}

std::vector<PlotRow> emit_plotdata(const ResultTable &table, const std::vector<std::string> &group_by)
{
    if (table.rows.empty())
        throw std::invalid_argument("emit_plotdata: result table is empty");

    struct Acc
    {
        std::vector<std::string> key;
        std::vector<double> se, ee, tx, na;
    };
    std::vector<Acc> groups;
    std::map<std::vector<std::string>, std::size_t> index;
    for (const auto &r : table.rows)
    {
        std::vector<std::string> key;
        for (const auto &k : group_by)
            key.push_back(group_value(r, k));
        if (r.status != "ok")
            continue;
        auto [it, fresh] = index.try_emplace(key, groups.size());
        if (fresh)
            groups.push_back({key, {}, {}, {}, {}});
        Acc &a = groups[it->second];
        a.se.push_back(r.sum_se);
        a.ee.push_back(r.ee);
        a.tx.push_back(r.tx_power_w);
        a.na.push_back(double(r.n_active));
    }

    std::vector<PlotRow> out;
    for (const auto &a : groups)
    {
        PlotRow p;
        p.key = a.key;
        p.count = a.se.size();
        std::tie(p.sum_se_mean, p.sum_se_stderr) = mean_stderr(a.se);
        std::tie(p.ee_mean, p.ee_stderr) = mean_stderr(a.ee);
        std::tie(p.tx_power_w_mean, p.tx_power_w_stderr) = mean_stderr(a.tx);
        std::tie(p.n_active_mean, p.n_active_stderr) = mean_stderr(a.na);
        out.push_back(std::move(p));
    }
    return out;
}

void write_plotdata(std::ostream &out, const std::vector<PlotRow> &rows, const std::vector<std::string> &group_by)
{
    for (const auto &k : group_by)
        out << k << ',';
    out << "count,sum_se_mean,sum_se_stderr,ee_mean,ee_stderr,tx_power_w_mean,tx_power_w_stderr,n_active_mean,"
           "n_active_stderr\n";
    for (const auto &p : rows)
    {
        for (const auto &v : p.key)
            out << csv_field(v) << ',';
        out << p.count << ',' << fmt(p.sum_se_mean) << ',' << fmt(p.sum_se_stderr) << ',' << fmt(p.ee_mean) << ','
            << fmt(p.ee_stderr) << ',' << fmt(p.tx_power_w_mean) << ',' << fmt(p.tx_power_w_stderr) << ','
            << fmt(p.n_active_mean) << ',' << fmt(p.n_active_stderr) << '\n';
    }
}

} // namespace qmimo
