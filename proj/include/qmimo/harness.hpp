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
#ifndef qmimo_harness_H
#define qmimo_harness_H

#include "qmimo/config.hpp"

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace qmimo
{

// Per-stream seed derived from the master seed through std::seed_seq.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

struct ResultRow
{
    int trial = 0;
    std::uint64_t seed = 0;  // per-trial seed
    arma::uword n_antennas = 0, n_users = 0;
    std::string dac_bits, adc_bits;  // BitSpec labels
    std::string algorithm;
    double p_dbm = 0.0;
    double sum_se = 0.0, ee = 0.0, tx_power_w = 0.0;
    int n_active = 0;
    std::map<unsigned, std::pair<int, int>> selection;  // DAC bits -> (selected, present)
    int outer = 0, middle = 0, inner = 0, gpi = 0;
    bool converged = true;
    std::string status = "ok";  // "ok" or a failure description
    double runtime_ms = 0.0;
};

struct ResultTable
{
    std::vector<ResultRow> rows;
    std::vector<std::uint64_t> trial_seeds;
    int failures = 0;  // rows whose solver raised

    void write_csv(std::ostream &out, bool with_runtime) const;
};

// Runs every trial with a pool of `threads` workers. Row order is
// (trial, N, K, dac spec, adc spec, P, algorithm) regardless of scheduling.
ResultTable run_experiment(const ExperimentConfig &config, unsigned threads = 1);

// Writes the CSV and the sidecar `<path>.meta.json`. Throws std::runtime_error
// when the path is not writable.
void write_results(const ResultTable &table, const ExperimentConfig &config, const std::string &path);

std::string config_sha256(const ExperimentConfig &config);

struct PlotRow
{
    std::vector<std::string> key;  // values of the group-by columns
    std::size_t count = 0;
    double sum_se_mean = 0, sum_se_stderr = 0;
    double ee_mean = 0, ee_stderr = 0;
    double tx_power_w_mean = 0, tx_power_w_stderr = 0;
    double n_active_mean = 0, n_active_stderr = 0;
};

// Mean and standard error (sample std / sqrt(n)) per group. Valid keys:
// algorithm, p_dbm, n_antennas, n_users, dac_bits, adc_bits. Rows with a
// failed status are skipped. Groups appear in order of first occurrence.
std::vector<PlotRow> emit_plotdata(const ResultTable &table, const std::vector<std::string> &group_by);
void write_plotdata(std::ostream &out, const std::vector<PlotRow> &rows, const std::vector<std::string> &group_by);

const std::vector<std::string> &default_group_keys();

// Mean and standard error of a sample; stderr is 0 for fewer than two values.
std::pair<double, double> mean_stderr(const std::vector<double> &x);

} // namespace qmimo

#endif
