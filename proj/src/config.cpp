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
#include "qmimo/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace qmimo
{

using nlohmann::json;

namespace
{
constexpr unsigned max_bits = 32;

void reject_unknown(const json &obj, const std::string &where, std::initializer_list<const char *> allowed)
{
    if (!obj.is_object())
        throw ConfigError("config: '" + where + "' must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto &item : obj.items())
        if (!ok.count(item.key()))
            throw ConfigError("config: unknown field '" + (where.empty() ? "" : where + ".") + item.key() + "'");
}

template <class T>
void read(const json &obj, const char *key, T &out, const std::string &where)
{
    if (!obj.contains(key))
        return;
    try
    {
        out = obj.at(key).get<T>();
    }
    catch (const json::exception &)
    {
        throw ConfigError("config: field '" + (where.empty() ? "" : where + ".") + key + "' has the wrong type");
    }
}

// Scalar or list of scalars.
template <class T>
std::vector<T> read_axis(const json &j, const std::string &field)
{
    try
    {
        if (j.is_array())
            return j.get<std::vector<T>>();
        return {j.get<T>()};
    }
    catch (const json::exception &)
    {
        throw ConfigError("config: field '" + field + "' has the wrong type");
    }
}

BitSpec parse_bits(const json &j, const std::string &field)
{
    try
    {
        if (j.is_number_unsigned())
            return BitSpec::make_fixed(j.get<unsigned>());
        if (j.is_object())
        {
            reject_unknown(j, field, {"fixed", "per_antenna", "uniform"});
            if (j.size() != 1)
                throw ConfigError("config: field '" + field + "' needs exactly one of fixed, per_antenna, uniform");
            if (j.contains("fixed"))
                return BitSpec::make_fixed(j.at("fixed").get<unsigned>());
            if (j.contains("per_antenna"))
                return BitSpec::make_list(j.at("per_antenna").get<std::vector<unsigned>>());
            const auto r = j.at("uniform").get<std::vector<unsigned>>();
            if (r.size() != 2)
                throw ConfigError("config: field '" + field + ".uniform' must be [lo, hi]");
            return BitSpec::make_uniform(r[0], r[1]);
        }
    }
    catch (const json::exception &)
    {
    }
    throw ConfigError("config: field '" + field + "' must be a bit width, {\"per_antenna\": [...]} or "
                      "{\"uniform\": [lo, hi]}");
}

// A single spec or a list of specs to sweep over.
std::vector<BitSpec> parse_bits_axis(const json &j, const std::string &field)
{
    std::vector<BitSpec> out;
    if (j.is_array())
    {
        for (std::size_t i = 0; i < j.size(); ++i)
            out.push_back(parse_bits(j[i], field + "[" + std::to_string(i) + "]"));
    }
    else
        out.push_back(parse_bits(j, field));
    return out;
}

json bits_to_json(const BitSpec &b)
{
    switch (b.kind)
    {
    case BitSpec::Kind::Fixed:
        return b.fixed;
    case BitSpec::Kind::List:
        return json{{"per_antenna", b.list}};
    default:
        return json{{"uniform", {b.lo, b.hi}}};
    }
}
} // namespace

// ---------- BitSpec ----------

BitSpec BitSpec::make_fixed(unsigned b)
{
    BitSpec s;
    s.kind = Kind::Fixed;
    s.fixed = b;
    return s;
}

BitSpec BitSpec::make_uniform(unsigned lo, unsigned hi)
{
    BitSpec s;
    s.kind = Kind::Uniform;
    s.lo = lo;
    s.hi = hi;
    return s;
}

BitSpec BitSpec::make_list(std::vector<unsigned> bits)
{
    BitSpec s;
    s.kind = Kind::List;
    s.list = std::move(bits);
    return s;
}

std::vector<unsigned> BitSpec::draw(std::size_t count, std::mt19937_64 &rng) const
{
    switch (kind)
    {
    case Kind::Fixed:
        return std::vector<unsigned>(count, fixed);
    case Kind::List:
        if (list.size() != count)
            throw ConfigError("bit list has " + std::to_string(list.size()) + " entries, expected " +
                              std::to_string(count));
        return list;
    default:
    {
        std::uniform_int_distribution<unsigned> u(lo, hi);
        std::vector<unsigned> out(count);
        for (auto &b : out)
            b = u(rng);
        return out;
    }
    }
}

std::string BitSpec::label() const
{
    switch (kind)
    {
    case Kind::Fixed:
        return std::to_string(fixed);
    case Kind::Uniform:
        return "U[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
    default:
    {
        std::string s = "L[";
        for (std::size_t i = 0; i < list.size(); ++i)
            s += (i ? "," : "") + std::to_string(list[i]);
        return s + "]";
    }
    }
}

void BitSpec::validate(const std::string &field) const
{
    auto in_range = [](unsigned b) { return b >= 1 && b <= max_bits; };
    switch (kind)
    {
    case Kind::Fixed:
        if (!in_range(fixed))
            throw ConfigError("config: field '" + field + "' must be in [1, 32]");
        break;
    case Kind::List:
        if (list.empty() || !std::all_of(list.begin(), list.end(), in_range))
            throw ConfigError("config: field '" + field + "' must be a non-empty list of widths in [1, 32]");
        break;
    case Kind::Uniform:
        if (!in_range(lo) || !in_range(hi) || lo > hi)
            throw ConfigError("config: field '" + field + "' needs 1 <= lo <= hi <= 32");
        break;
    }
}

// ---------- ExperimentConfig ----------

void ExperimentConfig::validate() const
{
    try
    {
        geometry.validate();
        power.validate();
        settings.validate();
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (trials < 1)
        throw ConfigError("config: field 'trials' must be at least 1");
    if (n_antennas.empty() || n_users.empty() || p_dbm.empty() || dac_bits.empty() || adc_bits.empty() ||
        algorithms.empty())
        throw ConfigError("config: sweep axes and 'algorithms' must be non-empty");
    for (auto n : n_antennas)
        if (n < 1)
            throw ConfigError("config: field 'n_antennas' must be positive");
    for (auto k : n_users)
        if (k < 1)
            throw ConfigError("config: field 'n_users' must be positive");
    for (double p : p_dbm)
        if (!std::isfinite(p))
            throw ConfigError("config: field 'p_dbm' must be finite");
    for (std::size_t i = 0; i < dac_bits.size(); ++i)
    {
        dac_bits[i].validate("dac_bits");
        if (dac_bits[i].kind == BitSpec::Kind::List)
            for (auto n : n_antennas)
                if (dac_bits[i].list.size() != n)
                    throw ConfigError("config: field 'dac_bits.per_antenna' length differs from n_antennas");
    }
    for (std::size_t i = 0; i < adc_bits.size(); ++i)
    {
        adc_bits[i].validate("adc_bits");
        if (adc_bits[i].kind == BitSpec::Kind::List)
            for (auto k : n_users)
                if (adc_bits[i].list.size() != k)
                    throw ConfigError("config: field 'adc_bits.per_antenna' length differs from n_users");
    }
    if (output_path.empty())
        throw ConfigError("config: field 'output' must not be empty");
}

ExperimentConfig parse_config(const std::string &json_text)
{
    json j;
    try
    {
        j = json::parse(json_text);
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    reject_unknown(j, "", {"geometry", "channel_model", "n_antennas", "n_users", "trials", "seed", "p_dbm",
                           "dac_bits", "adc_bits", "algorithms", "settings", "power_model", "output",
                           "record_runtime"});

    ExperimentConfig c;
    if (j.contains("geometry"))
    {
        const json &g = j["geometry"];
        reject_unknown(g, "geometry", {"cell_radius_m", "min_distance_m", "reference_distance_m",
                                       "pathloss_exponent", "carrier_hz", "bandwidth_hz", "shadowing_std_db",
                                       "noise_figure_db", "angular_spread_deg"});
        auto &G = c.geometry;
        read(g, "cell_radius_m", G.cell_radius_m, "geometry");
        read(g, "min_distance_m", G.min_distance_m, "geometry");
        read(g, "reference_distance_m", G.reference_distance_m, "geometry");
        read(g, "pathloss_exponent", G.pathloss_exponent, "geometry");
        read(g, "carrier_hz", G.carrier_hz, "geometry");
        read(g, "bandwidth_hz", G.bandwidth_hz, "geometry");
        read(g, "shadowing_std_db", G.shadowing_std_db, "geometry");
        read(g, "noise_figure_db", G.noise_figure_db, "geometry");
        read(g, "angular_spread_deg", G.angular_spread_deg, "geometry");
    }
    if (j.contains("channel_model"))
    {
        std::string m;
        read(j, "channel_model", m, "");
        if (m == "one_ring")
            c.channel_model = ChannelModel::OneRing;
        else if (m == "rayleigh")
            c.channel_model = ChannelModel::Rayleigh;
        else
            throw ConfigError("config: field 'channel_model' must be \"one_ring\" or \"rayleigh\"");
    }
    if (j.contains("n_antennas"))
        c.n_antennas = read_axis<arma::uword>(j["n_antennas"], "n_antennas");
    if (j.contains("n_users"))
        c.n_users = read_axis<arma::uword>(j["n_users"], "n_users");
    if (j.contains("p_dbm"))
        c.p_dbm = read_axis<double>(j["p_dbm"], "p_dbm");
    read(j, "trials", c.trials, "");
    read(j, "seed", c.master_seed, "");
    if (j.contains("dac_bits"))
        c.dac_bits = parse_bits_axis(j["dac_bits"], "dac_bits");
    if (j.contains("adc_bits"))
        c.adc_bits = parse_bits_axis(j["adc_bits"], "adc_bits");
    if (j.contains("algorithms"))
    {
        c.algorithms.clear();
        for (const auto &name : read_axis<std::string>(j["algorithms"], "algorithms"))
        {
            auto kind = parse_precoder_kind(name);
            if (!kind)
                throw ConfigError("config: field 'algorithms' has unknown algorithm '" + name + "'");
            c.algorithms.push_back(*kind);
        }
    }
    if (j.contains("settings"))
    {
        const json &s = j["settings"];
        reject_unknown(s, "settings", {"t_max", "t_max_gpi", "t_max_final_gpi", "eps_gpi", "eps0", "eps1", "eps2",
                                       "eps_final_gpi", "eps_as", "delta_gd_init", "armijo_c", "rho",
                                       "tau_floor"});
        auto &S = c.settings;
        read(s, "t_max", S.t_max, "settings");
        read(s, "t_max_gpi", S.t_max_gpi, "settings");
        read(s, "t_max_final_gpi", S.t_max_final_gpi, "settings");
        read(s, "eps_gpi", S.eps_gpi, "settings");
        read(s, "eps0", S.eps0, "settings");
        read(s, "eps1", S.eps1, "settings");
        read(s, "eps2", S.eps2, "settings");
        read(s, "eps_final_gpi", S.eps_final_gpi, "settings");
        read(s, "eps_as", S.eps_as, "settings");
        read(s, "delta_gd_init", S.delta_gd_init, "settings");
        read(s, "armijo_c", S.armijo_c, "settings");
        read(s, "rho", S.rho, "settings");
        read(s, "tau_floor", S.tau_floor, "settings");
    }
    if (j.contains("power_model"))
    {
        const json &p = j["power_model"];
        reject_unknown(p, "power_model", {"p_lp", "p_m", "p_lo", "p_h", "kappa", "f_s"});
        auto &P = c.power;
        read(p, "p_lp", P.p_lp, "power_model");
        read(p, "p_m", P.p_m, "power_model");
        read(p, "p_lo", P.p_lo, "power_model");
        read(p, "p_h", P.p_h, "power_model");
        read(p, "kappa", P.kappa, "power_model");
        read(p, "f_s", P.f_s, "power_model");
    }
    read(j, "output", c.output_path, "");
    read(j, "record_runtime", c.record_runtime, "");
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig &c)
{
    const auto &G = c.geometry;
    const auto &S = c.settings;
    const auto &P = c.power;
    json j;
    j["geometry"] = {{"cell_radius_m", G.cell_radius_m},
                     {"min_distance_m", G.min_distance_m},
                     {"reference_distance_m", G.reference_distance_m},
                     {"pathloss_exponent", G.pathloss_exponent},
                     {"carrier_hz", G.carrier_hz},
                     {"bandwidth_hz", G.bandwidth_hz},
                     {"shadowing_std_db", G.shadowing_std_db},
                     {"noise_figure_db", G.noise_figure_db},
                     {"angular_spread_deg", G.angular_spread_deg}};
    j["channel_model"] = c.channel_model == ChannelModel::OneRing ? "one_ring" : "rayleigh";
    j["n_antennas"] = c.n_antennas;
    j["n_users"] = c.n_users;
    j["trials"] = c.trials;
    j["seed"] = c.master_seed;
    j["p_dbm"] = c.p_dbm;
    j["dac_bits"] = json::array();
    for (const auto &b : c.dac_bits)
        j["dac_bits"].push_back(bits_to_json(b));
    j["adc_bits"] = json::array();
    for (const auto &b : c.adc_bits)
        j["adc_bits"].push_back(bits_to_json(b));
    j["algorithms"] = json::array();
    for (auto k : c.algorithms)
        j["algorithms"].push_back(to_string(k));
    j["settings"] = {{"t_max", S.t_max},
                     {"t_max_gpi", S.t_max_gpi},
                     {"t_max_final_gpi", S.t_max_final_gpi},
                     {"eps_gpi", S.eps_gpi},
                     {"eps0", S.eps0},
                     {"eps1", S.eps1},
                     {"eps2", S.eps2},
                     {"eps_final_gpi", S.eps_final_gpi},
                     {"eps_as", S.eps_as},
                     {"delta_gd_init", S.delta_gd_init},
                     {"armijo_c", S.armijo_c},
                     {"rho", S.rho},
                     {"tau_floor", S.tau_floor}};
    j["power_model"] = {{"p_lp", P.p_lp}, {"p_m", P.p_m},     {"p_lo", P.p_lo},
                        {"p_h", P.p_h},   {"kappa", P.kappa}, {"f_s", P.f_s}};
    j["output"] = c.output_path;
    j["record_runtime"] = c.record_runtime;
    return j.dump(2);
}

} // namespace qmimo
