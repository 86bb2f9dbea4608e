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
#ifndef qmimo_config_H
#define qmimo_config_H

#include "qmimo/baselines.hpp"
#include "qmimo/channel.hpp"
#include "qmimo/ee_optimizer.hpp"
#include "qmimo/metrics.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmimo
{

// Invalid configuration; the message names the offending field.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// How bit widths are assigned to the antennas (DAC) or users (ADC).
// JSON forms: 4 | {"per_antenna": [..]} | {"uniform": [lo, hi]}.
struct BitSpec
{
    enum class Kind
    {
        Fixed,
        List,
        Uniform
    };
    Kind kind = Kind::Fixed;
    unsigned fixed = 4;
    std::vector<unsigned> list;
    unsigned lo = 1, hi = 1;

    static BitSpec make_fixed(unsigned b);
    static BitSpec make_uniform(unsigned lo, unsigned hi);
    static BitSpec make_list(std::vector<unsigned> bits);

    // Bits for `count` entities. Uniform draws are independent per entity.
    std::vector<unsigned> draw(std::size_t count, std::mt19937_64 &rng) const;
    // Short label used in result tables: "4", "U[2,12]", "L[2,4,...]".
    std::string label() const;
    void validate(const std::string &field) const;
};

struct ExperimentConfig
{
    ScenarioGeometry geometry;
    ChannelModel channel_model = ChannelModel::OneRing;
    std::vector<arma::uword> n_antennas{16};
    std::vector<arma::uword> n_users{4};
    int trials = 100;
    std::uint64_t master_seed = 1;
    std::vector<double> p_dbm{30.0};
    std::vector<BitSpec> dac_bits{BitSpec::make_uniform(2, 12)};
    std::vector<BitSpec> adc_bits{BitSpec::make_uniform(2, 6)};
    std::vector<PrecoderKind> algorithms{PrecoderKind::Q_GPI_EEM};
    SolveSettings settings;
    PowerModelConstants power;
    std::string output_path = "results.csv";
    bool record_runtime = false;  // runtime_ms makes the output nondeterministic

    // Throws ConfigError naming the field.
    void validate() const;
};

ExperimentConfig parse_config(const std::string &json_text);
ExperimentConfig load_config(const std::string &path);
// Canonical JSON of the effective configuration (used for hashing).
std::string dump_config(const ExperimentConfig &config);

} // namespace qmimo

#endif
