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

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace qmimo;

namespace
{
ExperimentConfig small_config()
{
    return parse_config(R"({
        "n_antennas": 6, "n_users": 2, "trials": 3, "seed": 99,
        "p_dbm": [0, 20],
        "dac_bits": {"uniform": [2, 8]}, "adc_bits": 4,
        "algorithms": ["Q-GPI-EEM", "Q-RZF", "ZF"]
    })");
}

std::string csv(const ResultTable &t)
{
    std::ostringstream os;
    t.write_csv(os, false);
    return os.str();
}

ResultRow synthetic(double se, double ee, const std::string &alg = "X")
{
    ResultRow r;
    r.algorithm = alg;
    r.sum_se = se;
    r.ee = ee;
    return r;
}
} // namespace

TEST_CASE("one row per trial, grid point and algorithm")
{
    ExperimentConfig c = small_config();
    c.trials = 1;
    c.p_dbm = {10.0};
    c.algorithms = {PrecoderKind::Q_MRT, PrecoderKind::Q_GPI_SEM};
    CHECK(run_experiment(c).rows.size() == 2);

    const ResultTable t = run_experiment(small_config());
    CHECK(t.rows.size() == 3 * 2 * 3);
    CHECK(t.trial_seeds.size() == 3);
    CHECK(t.failures == 0);
    for (const auto &r : t.rows)
    {
        CHECK(r.status == "ok");
        CHECK(r.n_antennas == 6);
        CHECK(r.dac_bits == "U[2,8]");
        CHECK(r.adc_bits == "4");
        int present = 0;
        for (const auto &[bits, sp] : r.selection)
        {
            CHECK(sp.first <= sp.second);
            present += sp.second;
        }
        CHECK(present == 6);
    }
}

TEST_CASE("output is byte-identical across runs and thread counts")
{
    const ExperimentConfig c = small_config();
    const std::string a = csv(run_experiment(c, 1));
    CHECK(a == csv(run_experiment(c, 1)));
    CHECK(a == csv(run_experiment(c, 3)));

    ExperimentConfig d = c;
    d.master_seed = 100;
    CHECK(a != csv(run_experiment(d, 1)));
    CHECK(a.substr(0, a.find('\n')) ==
          "trial,seed,n_antennas,n_users,dac_bits,adc_bits,algorithm,p_dbm,sum_se,ee,tx_power_w,n_active,selection,"
          "outer_iters,middle_iters,inner_iters,gpi_iters,converged,status");
}

TEST_CASE("trial seeds depend only on the master seed and index")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t t = 0; t < 1000; ++t)
        seen.insert(derive_seed(7, {t}));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(7, {3}) == derive_seed(7, {3}));
    CHECK(derive_seed(7, {3}) != derive_seed(8, {3}));
    CHECK(derive_seed(7, {1, 2}) != derive_seed(7, {2, 1}));

    ExperimentConfig c = small_config();
    const auto full = run_experiment(c).trial_seeds;
    c.trials = 2;
    const auto part = run_experiment(c).trial_seeds;
    CHECK(std::equal(part.begin(), part.end(), full.begin()));
}

TEST_CASE("config parsing")
{
    CHECK_THROWS_WITH(parse_config(R"({"settings": {"eps_az": 0.05}})"),
                      ContainsSubstring("unknown field 'settings.eps_az'"));
    CHECK_THROWS_WITH(parse_config(R"({"trails": 5})"), ContainsSubstring("'trails'"));
    CHECK_THROWS_AS(parse_config(R"({"trials": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"dac_bits": {"uniform": [8, 2]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"algorithms": ["MMSE"]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"p_dbm": []})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(load_config(QMIMO_SOURCE_DIR "/tests/data/bad_key.json"), ConfigError);

    const ExperimentConfig c = parse_config(R"({"settings": {"eps_as": 0.2, "t_max": 12},
                                               "dac_bits": [{"per_antenna": [2, 4, 6, 8]}, 3],
                                               "n_antennas": 4})");
    CHECK(c.settings.eps_as == 0.2);
    CHECK(c.settings.t_max == 12);
    REQUIRE(c.dac_bits.size() == 2);
    CHECK(c.dac_bits[0].label() == "L[2,4,6,8]");
    CHECK(c.dac_bits[1].label() == "3");

    const std::string canon = dump_config(c);
    CHECK(dump_config(parse_config(canon)) == canon);
    CHECK(config_sha256(c) == config_sha256(parse_config(canon)));
    CHECK(config_sha256(c) != config_sha256(small_config()));
    CHECK(config_sha256(c).size() == 64);
}

TEST_CASE("bit specs")
{
    std::mt19937_64 rng(1);
    const BitSpec u = BitSpec::make_uniform(2, 12);
    std::set<unsigned> seen;
    for (unsigned b : u.draw(2000, rng))
    {
        CHECK(b >= 2);
        CHECK(b <= 12);
        seen.insert(b);
    }
    CHECK(seen.size() == 11);
    CHECK(BitSpec::make_fixed(5).draw(3, rng) == std::vector<unsigned>{5, 5, 5});
    CHECK(BitSpec::make_list({1, 2}).draw(2, rng) == std::vector<unsigned>{1, 2});
    CHECK_THROWS_AS(BitSpec::make_list({1, 2}).draw(3, rng), std::exception);
    CHECK_THROWS_AS(BitSpec::make_uniform(0, 3).validate("dac_bits"), ConfigError);
}

TEST_CASE("plot data statistics")
{
    ResultTable one;
    one.rows = {synthetic(3.5, 1.25)};
    auto p = emit_plotdata(one, {"algorithm"});
    REQUIRE(p.size() == 1);
    CHECK(p[0].sum_se_mean == 3.5);
    CHECK(p[0].sum_se_stderr == 0.0);
    CHECK(p[0].count == 1);

    ResultTable two;
    two.rows = {synthetic(2.0, 1.0), synthetic(2.0, 1.0)};
    p = emit_plotdata(two, {"algorithm"});
    CHECK(p[0].sum_se_stderr == 0.0);
    CHECK(p[0].ee_stderr == 0.0);

    // known-mean synthetic data
    ResultTable many;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(4.0, 1.5);
    for (int i = 0; i < 100; ++i)
        many.rows.push_back(synthetic(g(rng), 1.0, i % 2 ? "A" : "B"));
    p = emit_plotdata(many, {"algorithm"});
    REQUIRE(p.size() == 2);
    CHECK(p[0].key == std::vector<std::string>{"B"});
    for (const auto &row : p)
    {
        CHECK(row.count == 50);
        CHECK(std::abs(row.sum_se_mean - 4.0) <= 3.0 * row.sum_se_stderr);
        CHECK_THAT(row.sum_se_stderr, WithinRel(1.5 / std::sqrt(50.0), 0.3));
    }

    const auto [m, se] = mean_stderr({1.0, 2.0, 3.0, 4.0});
    CHECK(m == 2.5);
    CHECK_THAT(se, WithinRel(std::sqrt(5.0 / 3.0) / 2.0, 1e-14));

    ResultTable failed = two;
    failed.rows[1].status = "diverged: x";
    failed.rows[1].sum_se = NAN;
    CHECK(emit_plotdata(failed, {"algorithm"})[0].count == 1);

    CHECK_THROWS(emit_plotdata(ResultTable{}, {"algorithm"}));
    CHECK_THROWS(emit_plotdata(one, {"colour"}));

    std::ostringstream os;
    write_plotdata(os, emit_plotdata(many, {"algorithm"}), {"algorithm"});
    const std::string text = os.str();
    CHECK(text.rfind("algorithm,count,sum_se_mean", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("results are written with a metadata sidecar")
{
    const auto dir = std::filesystem::temp_directory_path() / "qmimo_harness_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "out.csv").string();
    ExperimentConfig c = small_config();
    c.trials = 1;
    const ResultTable t = run_experiment(c);
    write_results(t, c, path);
    std::ifstream meta(path + ".meta.json");
    REQUIRE(meta.good());
    const std::string body((std::istreambuf_iterator<char>(meta)), std::istreambuf_iterator<char>());
    CHECK_THAT(body, ContainsSubstring(config_sha256(c)));
    CHECK_THAT(body, ContainsSubstring("trial_seeds"));
    std::ifstream out(path);
    const std::string data((std::istreambuf_iterator<char>(out)), std::istreambuf_iterator<char>());
    CHECK(data == csv(t));
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(write_results(t, c, "/nonexistent-dir/x/out.csv"), std::runtime_error);
}
