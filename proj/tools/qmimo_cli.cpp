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
// Command-line experiment runner.
//
//   qmimo run      <config.json> [--seed S] [--threads T] [--out PATH] [--plotdata PATH] [--allow-nonconverged]
//   qmimo sweep    <config.json> [axis overrides] [same flags as run]
//   qmimo validate <config.json>

#include "qmimo/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

namespace
{

struct RunOptions
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out;
    std::string plotdata;
    bool allow_nonconverged = false;
};

struct SweepAxes
{
    std::vector<double> p_dbm;
    std::vector<arma::uword> n_antennas, n_users;
    std::vector<unsigned> dac_bits, adc_bits;
    std::vector<std::string> algorithms;
    std::optional<int> trials;
};

void add_run_flags(CLI::App *cmd, RunOptions &o)
{
    cmd->add_option("config", o.config_path, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Override the master seed");
    cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    cmd->add_option("--out", o.out, "Output CSV (overrides the config)");
    cmd->add_option("--plotdata", o.plotdata, "Also write per-group mean and standard error to this CSV");
    cmd->add_flag("--allow-nonconverged", o.allow_nonconverged, "Exit 0 even if a solver diverged");
}

int execute(qmimo::ExperimentConfig cfg, const RunOptions &o)
{
    if (o.seed)
        cfg.master_seed = *o.seed;
    if (!o.out.empty())
        cfg.output_path = o.out;
    cfg.validate();

    const qmimo::ResultTable table = qmimo::run_experiment(cfg, o.threads);
    qmimo::write_results(table, cfg, cfg.output_path);
    std::cout << "wrote " << table.rows.size() << " rows to " << cfg.output_path << '\n';

    if (!o.plotdata.empty())
    {
        std::ofstream pd(o.plotdata);
        if (!pd)
            throw std::runtime_error("cannot write plot data to '" + o.plotdata + "'");
        const auto &keys = qmimo::default_group_keys();
        qmimo::write_plotdata(pd, qmimo::emit_plotdata(table, keys), keys);
        std::cout << "wrote plot data to " << o.plotdata << '\n';
    }

    if (table.failures > 0)
    {
        for (const auto &r : table.rows)
            if (r.status != "ok")
                std::cerr << "trial " << r.trial << " " << r.algorithm << " p_dbm=" << r.p_dbm << ": " << r.status
                          << '\n';
        std::cerr << table.failures << " solver failure(s)\n";
        if (!o.allow_nonconverged)
            return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Quantization-aware precoding experiments for massive MIMO downlinks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(QMIMO_VERSION));

    RunOptions run_opts;
    auto *run = app.add_subcommand("run", "Run the experiment described by a config file");
    add_run_flags(run, run_opts);

    RunOptions sweep_opts;
    SweepAxes axes;
    auto *sweep = app.add_subcommand("sweep", "Run a config with sweep axes overridden on the command line");
    add_run_flags(sweep, sweep_opts);
    sweep->add_option("--p-dbm", axes.p_dbm, "Transmit power grid [dBm]");
    sweep->add_option("--n-antennas", axes.n_antennas, "Antenna counts");
    sweep->add_option("--n-users", axes.n_users, "User counts");
    sweep->add_option("--dac-bits", axes.dac_bits, "Fixed DAC bit widths to sweep");
    sweep->add_option("--adc-bits", axes.adc_bits, "Fixed ADC bit widths to sweep");
    sweep->add_option("--algorithms", axes.algorithms, "Algorithms, e.g. Q-GPI-EEM Q-ZF");
    sweep->add_option("--trials", axes.trials, "Number of trials")->check(CLI::Range(1, 1000000));

    std::string validate_path;
    auto *validate = app.add_subcommand("validate", "Check a config file and print its canonical form");
    validate->add_option("config", validate_path, "Experiment configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*validate)
        {
            const auto cfg = qmimo::load_config(validate_path);
            std::cout << qmimo::dump_config(cfg) << "\nconfig_sha256 " << qmimo::config_sha256(cfg) << '\n';
            return 0;
        }
        if (*run)
            return execute(qmimo::load_config(run_opts.config_path), run_opts);

        auto cfg = qmimo::load_config(sweep_opts.config_path);
        if (!axes.p_dbm.empty())
            cfg.p_dbm = axes.p_dbm;
        if (!axes.n_antennas.empty())
            cfg.n_antennas = axes.n_antennas;
        if (!axes.n_users.empty())
            cfg.n_users = axes.n_users;
        if (!axes.dac_bits.empty())
        {
            cfg.dac_bits.clear();
            for (unsigned b : axes.dac_bits)
                cfg.dac_bits.push_back(qmimo::BitSpec::make_fixed(b));
        }
        if (!axes.adc_bits.empty())
        {
            cfg.adc_bits.clear();
            for (unsigned b : axes.adc_bits)
                cfg.adc_bits.push_back(qmimo::BitSpec::make_fixed(b));
        }
        if (!axes.algorithms.empty())
        {
            cfg.algorithms.clear();
            for (const auto &name : axes.algorithms)
            {
                auto kind = qmimo::parse_precoder_kind(name);
                if (!kind)
                    throw qmimo::ConfigError("unknown algorithm '" + name + "'");
                cfg.algorithms.push_back(*kind);
            }
        }
        if (axes.trials)
            cfg.trials = *axes.trials;
        return execute(std::move(cfg), sweep_opts);
    }
    catch (const qmimo::ConfigError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
