// SPDX-License-Identifier: Apache-2.0
//
// rsris: rate-splitting transmit design for RIS-assisted multicell MIMO
// Copyright (C) 2026 The rsris authors
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

#include "rsris/experiment.hpp"

#include "json.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rsris
{

namespace pt = boost::property_tree;

std::string SchemeConfig::label() const
{
    std::string s = signaling == Signaling::improper ? "IGS" : "PGS";
    s += scheme == Scheme::rs ? "-RS-" : "-TIN-";
    s += ris;
    if (random_theta)
        s += "-random";
    if (!iqi_aware)
        s += "-unaware";
    return s;
}

const char *to_string(SweepAxis a)
{
    switch (a)
    {
    case SweepAxis::power_dbw:
        return "power_dbw";
    case SweepAxis::target_rate:
        return "target_rate";
    case SweepAxis::bs_antennas:
        return "bs_antennas";
    case SweepAxis::users_per_cell:
        return "users_per_cell";
    case SweepAxis::ris_elements:
        return "ris_elements";
    }
    return "?";
}

namespace
{

const std::map<std::string, std::vector<std::string>> &schema()
{
    static const std::map<std::string, std::vector<std::string>> s{
        {"scenario",
         {"cells", "users_per_cell", "bs_antennas", "user_antennas", "ris_elements", "user_square_side",
          "reference_loss_db", "direct_exponent", "ris_exponent", "rician_k_db", "noise_power_dbm",
          "transmission_side_users", "block_transmission_side", "iqi_epsilon", "iqi_phi_deg"}},
        {"schemes",
         {"signaling", "scheme", "ris", "theta", "iqi_aware", "theta_min", "alpha", "phi_over_pi", "grid_levels",
          "epsilon_relax", "nested_sets"}},
        {"objective",
         {"kind", "power_dbw", "target_rate", "static_power", "efficiency", "rel_tol", "max_iterations",
          "extrapolate"}},
        {"sweep", {"axis", "values"}},
        {"run", {"trials", "seed", "threads", "save_traces"}},
    };
    return s;
}

std::size_t edit_distance(const std::string &a, const std::string &b)
{
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), 0);
    for (std::size_t i = 1; i <= a.size(); ++i)
    {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
        {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row.back();
}

std::string nearest(const std::string &word, const std::vector<std::string> &options)
{
    return *std::min_element(options.begin(), options.end(), [&](const std::string &x, const std::string &y) {
        return edit_distance(word, x) < edit_distance(word, y);
    });
}

std::vector<std::string> split_list(const std::string &v)
{
    std::vector<std::string> parts;
    boost::split(parts, v, boost::is_any_of(","));
    for (auto &p : parts)
        boost::trim(p);
    parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
    return parts;
}

class Reader
{
  public:
    explicit Reader(const pt::ptree &tree) : tree_(tree)
    {
        std::vector<std::string> sections;
        for (const auto &[name, keys] : schema())
            sections.push_back(name);
        for (const auto &[sec, body] : tree)
        {
            if (!schema().count(sec))
                throw std::invalid_argument("config: unknown section [" + sec + "]; did you mean [" +
                                            nearest(sec, sections) + "]?");
            const auto &keys = schema().at(sec);
            for (const auto &[key, value] : body)
                if (std::find(keys.begin(), keys.end(), key) == keys.end())
                    throw std::invalid_argument("config: unknown key '" + sec + "." + key + "'; did you mean '" +
                                                sec + "." + nearest(key, keys) + "'?");
        }
    }

    template <class T> T get(const std::string &key, T fallback)
    {
        const auto raw = tree_.get_optional<std::string>(key);
        T out = fallback;
        if (raw)
        {
            try
            {
                out = boost::lexical_cast<T>(boost::trim_copy(*raw));
            }
            catch (const boost::bad_lexical_cast &)
            {
                throw std::invalid_argument("config: cannot parse '" + key + "' from '" + *raw + "'");
            }
        }
        echo[key] = boost::lexical_cast<std::string>(out);
        return out;
    }

    bool get_bool(const std::string &key, bool fallback)
    {
        const auto raw = tree_.get_optional<std::string>(key);
        bool out = fallback;
        if (raw)
            out = parse_bool(key, *raw);
        echo[key] = out ? "true" : "false";
        return out;
    }

    std::vector<std::string> get_list(const std::string &key, const std::string &fallback)
    {
        const std::string v = tree_.get<std::string>(key, fallback);
        echo[key] = v;
        auto parts = split_list(v);
        if (parts.empty())
            throw std::invalid_argument("config: '" + key + "' must list at least one entry");
        return parts;
    }

    static bool parse_bool(const std::string &key, const std::string &raw)
    {
        const std::string v = boost::to_lower_copy(boost::trim_copy(raw));
        if (v == "true" || v == "yes" || v == "1" || v == "on")
            return true;
        if (v == "false" || v == "no" || v == "0" || v == "off")
            return false;
        throw std::invalid_argument("config: '" + key + "' is not a boolean: '" + raw + "'");
    }

    std::map<std::string, std::string> echo;

  private:
    const pt::ptree &tree_;
};

Signaling parse_signaling(const std::string &s)
{
    const auto v = boost::to_upper_copy(s);
    if (v == "IGS")
        return Signaling::improper;
    if (v == "PGS")
        return Signaling::proper;
    throw std::invalid_argument("config: schemes.signaling entries are IGS or PGS, got '" + s + "'");
}

Scheme parse_scheme(const std::string &s)
{
    const auto v = boost::to_upper_copy(s);
    if (v == "RS")
        return Scheme::rs;
    if (v == "TIN")
        return Scheme::tin;
    throw std::invalid_argument("config: schemes.scheme entries are RS or TIN, got '" + s + "'");
}

std::string parse_ris(const std::string &s)
{
    static const std::vector<std::string> kinds{"U", "I", "C", "D", "STAR", "none"};
    for (const auto &k : kinds)
        if (boost::iequals(k, s))
            return k;
    throw std::invalid_argument("config: schemes.ris entries are U, I, C, D, STAR or none, got '" + s + "'");
}

ObjectiveKind parse_objective(const std::string &s)
{
    const auto v = boost::to_lower_copy(s);
    if (v == "mwrm")
        return ObjectiveKind::mwrm;
    if (v == "wsrm")
        return ObjectiveKind::wsrm;
    if (v == "gee")
        return ObjectiveKind::gee;
    if (v == "mwee")
        return ObjectiveKind::mwee;
    if (v == "powermin" || v == "power_min")
        return ObjectiveKind::power_min;
    throw std::invalid_argument("config: objective.kind is one of MWRM, WSRM, GEE, MWEE, PowerMin; got '" + s + "'");
}

SweepAxis parse_axis(const std::string &s)
{
    for (SweepAxis a : {SweepAxis::power_dbw, SweepAxis::target_rate, SweepAxis::bs_antennas,
                        SweepAxis::users_per_cell, SweepAxis::ris_elements})
        if (s == to_string(a))
            return a;
    throw std::invalid_argument("config: unknown sweep.axis '" + s + "'");
}

SetKind set_kind_of(const std::string &ris)
{
    if (ris == "U")
        return SetKind::unit_disk;
    if (ris == "C")
        return SetKind::coupled_phase;
    if (ris == "D")
        return SetKind::discrete_phase;
    if (ris == "STAR")
        return SetKind::star_es;
    return SetKind::unit_modulus;
}

void require(bool ok, const std::string &what)
{
    if (!ok)
        throw std::invalid_argument("config: " + what);
}

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

ExperimentConfig from_tree(const pt::ptree &tree)
{
    Reader r(tree);
    ExperimentConfig c;
    auto &s = c.scenario;
    s.cells = r.get("scenario.cells", s.cells);
    s.users_per_cell = r.get("scenario.users_per_cell", s.users_per_cell);
    s.bs_antennas = r.get("scenario.bs_antennas", s.bs_antennas);
    s.user_antennas = r.get("scenario.user_antennas", s.user_antennas);
    s.ris_elements = r.get("scenario.ris_elements", s.ris_elements);
    s.user_square_side = r.get("scenario.user_square_side", s.user_square_side);
    s.fading.reference_loss_db = r.get("scenario.reference_loss_db", s.fading.reference_loss_db);
    s.fading.direct_exponent = r.get("scenario.direct_exponent", s.fading.direct_exponent);
    s.fading.ris_exponent = r.get("scenario.ris_exponent", s.fading.ris_exponent);
    s.fading.rician_k_db = r.get("scenario.rician_k_db", s.fading.rician_k_db);
    s.fading.noise_power_dbm = r.get("scenario.noise_power_dbm", s.fading.noise_power_dbm);
    s.fading.transmission_side_users = r.get("scenario.transmission_side_users", s.fading.transmission_side_users);
    s.fading.block_transmission_side = r.get_bool("scenario.block_transmission_side", false);
    s.iqi_epsilon = r.get("scenario.iqi_epsilon", s.iqi_epsilon);
    s.iqi_phi_deg = r.get("scenario.iqi_phi_deg", s.iqi_phi_deg);

    const auto sig = r.get_list("schemes.signaling", "IGS");
    const auto sch = r.get_list("schemes.scheme", "RS");
    const auto ris = r.get_list("schemes.ris", "I");
    const auto theta = r.get_list("schemes.theta", "optimized");
    const auto aware = r.get_list("schemes.iqi_aware", "true");
    for (const auto &a : sig)
        for (const auto &b : sch)
            for (const auto &m : ris)
                for (const auto &t : theta)
                    for (const auto &w : aware)
                    {
                        SchemeConfig sc;
                        sc.signaling = parse_signaling(a);
                        sc.scheme = parse_scheme(b);
                        sc.ris = parse_ris(m);
                        if (t != "optimized" && t != "random")
                            throw std::invalid_argument("config: schemes.theta entries are optimized or random");
                        sc.random_theta = t == "random";
                        sc.iqi_aware = Reader::parse_bool("schemes.iqi_aware", w);
                        c.schemes.push_back(sc);
                    }
    c.ris_set.law.theta_min = r.get("schemes.theta_min", c.ris_set.law.theta_min);
    c.ris_set.law.alpha = r.get("schemes.alpha", c.ris_set.law.alpha);
    c.ris_set.law.phi = std::numbers::pi * r.get("schemes.phi_over_pi", c.ris_set.law.phi / std::numbers::pi);
    c.ris_set.grid.levels = r.get("schemes.grid_levels", c.ris_set.grid.levels);
    c.ris_set.relax.epsilon_relax = r.get("schemes.epsilon_relax", c.ris_set.relax.epsilon_relax);
    c.nested_sets = r.get_bool("schemes.nested_sets", c.nested_sets);

    c.objective = parse_objective(r.get<std::string>("objective.kind", "MWRM"));
    c.power_dbw = r.get("objective.power_dbw", c.power_dbw);
    c.target_rate = r.get("objective.target_rate", c.target_rate);
    c.power.static_power = r.get("objective.static_power", c.power.static_power);
    c.power.inv_efficiency = 1.0 / r.get("objective.efficiency", 1.0 / c.power.inv_efficiency);
    c.convergence.rel_tol = r.get("objective.rel_tol", c.convergence.rel_tol);
    c.convergence.max_iterations = r.get("objective.max_iterations", c.convergence.max_iterations);
    c.convergence.extrapolate = r.get_bool("objective.extrapolate", c.convergence.extrapolate);

    c.axis = parse_axis(r.get<std::string>("sweep.axis", "power_dbw"));
    c.sweep_values.clear();
    for (const auto &v : r.get_list("sweep.values", boost::lexical_cast<std::string>(c.power_dbw)))
    {
        try
        {
            c.sweep_values.push_back(boost::lexical_cast<double>(v));
        }
        catch (const boost::bad_lexical_cast &)
        {
            throw std::invalid_argument("config: cannot parse sweep value '" + v + "'");
        }
    }

    c.trials = r.get("run.trials", c.trials);
    c.seed = r.get("run.seed", c.seed);
    c.threads = r.get("run.threads", c.threads);
    c.save_traces = r.get_bool("run.save_traces", c.save_traces);
    c.echo = std::move(r.echo);
    c.validate();
    return c;
}

} // namespace

void ExperimentConfig::validate() const
{
    const auto &s = scenario;
    require(s.cells == 1 || s.cells == 2, "scenario.cells must be 1 or 2");
    require(s.users_per_cell >= 1, "scenario.users_per_cell must be >= 1");
    require(s.bs_antennas >= 1, "scenario.bs_antennas must be >= 1");
    require(s.user_antennas >= 1, "scenario.user_antennas must be >= 1");
    require(s.ris_elements >= 1, "scenario.ris_elements must be >= 1");
    require(s.user_square_side > 0.0, "scenario.user_square_side must be positive");
    require(s.iqi_epsilon > 0.0, "scenario.iqi_epsilon must be positive");
    require(std::abs(s.iqi_phi_deg) < 90.0, "scenario.iqi_phi_deg must lie in (-90, 90)");
    require(s.fading.transmission_side_users <= s.users_per_cell,
            "scenario.transmission_side_users must not exceed users_per_cell");
    s.fading.validate();
    require(!schemes.empty(), "the scheme matrix is empty");
    ris_set.law.validate();
    ris_set.grid.validate();
    ris_set.relax.validate();
    power.validate();
    convergence.validate();
    require(target_rate >= 0.0, "objective.target_rate must be >= 0");
    require(objective != ObjectiveKind::power_min || target_rate > 0.0 || axis == SweepAxis::target_rate,
            "objective.target_rate must be positive for PowerMin");
    require(!sweep_values.empty(), "sweep.values must not be empty");
    for (double v : sweep_values)
    {
        require(std::isfinite(v), "sweep.values must be finite");
        switch (axis)
        {
        case SweepAxis::power_dbw:
            break;
        case SweepAxis::target_rate:
            require(v >= 0.0, "sweep.values must be >= 0 for target_rate");
            break;
        case SweepAxis::bs_antennas:
        case SweepAxis::users_per_cell:
        case SweepAxis::ris_elements:
            require(is_integral(v) && v >= 1.0, std::string("sweep.values must be positive integers for ") +
                                                    to_string(axis));
            break;
        }
    }
    require(trials >= 1, "run.trials must be >= 1");
    require(threads >= 1, "run.threads must be >= 1");
}

ExperimentConfig parse_config(const std::string &text)
{
    pt::ptree tree;
    std::istringstream in(text);
    try
    {
        pt::read_ini(in, tree);
    }
    catch (const pt::ini_parser_error &e)
    {
        throw std::invalid_argument(std::string("config: parse error: ") + e.message() + " (line " +
                                    std::to_string(e.line()) + ")");
    }
    return from_tree(tree);
}

ExperimentConfig validate_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial)
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(base) ^ trial);
}

double headline_metric(ObjectiveKind kind, const RunTrace &t)
{
    switch (kind)
    {
    case ObjectiveKind::mwrm:
        return t.min_rate;
    case ObjectiveKind::power_min:
        return t.total_power;
    default:
        return t.objective;
    }
}

namespace
{

// Everything one run of one scheme needs; schemes of a trial share the realization.
struct TrialSetup
{
    FadingSet fading;
    HardwareModel hw;
    ProblemSpec spec;
    AoOptions ao;
};

TrialSetup setup_trial(const ExperimentConfig &cfg, const SchemeConfig &scheme, double sweep_value,
                       std::uint64_t seed)
{
    ScenarioConfig sc = cfg.scenario;
    double power_dbw = cfg.power_dbw;
    double target = cfg.target_rate;
    switch (cfg.axis)
    {
    case SweepAxis::power_dbw:
        power_dbw = sweep_value;
        break;
    case SweepAxis::target_rate:
        target = sweep_value;
        break;
    case SweepAxis::bs_antennas:
        sc.bs_antennas = static_cast<int>(sweep_value);
        break;
    case SweepAxis::users_per_cell:
        sc.users_per_cell = static_cast<int>(sweep_value);
        break;
    case SweepAxis::ris_elements:
        sc.ris_elements = static_cast<int>(sweep_value);
        break;
    }

    Topology topo = sc.cells == 2
                        ? Topology::two_cell(sc.users_per_cell, sc.bs_antennas, sc.user_antennas, sc.ris_elements)
                        : Topology::single_cell(sc.users_per_cell, sc.bs_antennas, sc.user_antennas, sc.ris_elements);
    topo.user_square_side = sc.user_square_side;
    FadingParams fp = sc.fading;
    fp.transmission_side_users = std::min(fp.transmission_side_users, sc.users_per_cell);
    // every scheme of this trial draws the same realization
    FadingSet fading = sample_scenario(topo, fp, seed);

    AoOptions ao;
    ao.set = cfg.ris_set;
    ao.set.kind = set_kind_of(scheme.ris);
    ao.theta_seed = trial_seed(seed, 0x7e7aULL);
    ao.optimize_theta = !scheme.random_theta && scheme.ris != "none";
    if (scheme.ris == "none")
        fading = fading.without_ris();
    else if (scheme.ris == "STAR")
        ao.space_map = default_space_map(fading, fp.transmission_side_users);
    else if (fp.block_transmission_side && fp.transmission_side_users > 0)
    {
        const UserSpaceMap side = default_space_map(fading, fp.transmission_side_users);
        std::vector<std::vector<bool>> mask(side.size());
        for (std::size_t l = 0; l < side.size(); ++l)
            for (auto u : side[l])
                mask[l].push_back(u == UserSpace::transmission);
        fading = fading.block_transmission_side(mask);
    }

    const double phi = sc.iqi_phi_deg * std::numbers::pi / 180.0;
    HardwareModel hw = HardwareModel::uniform(fading, sc.iqi_epsilon, phi);

    ProblemSpec spec;
    spec.iqi_aware = scheme.iqi_aware;
    spec.convergence = cfg.convergence;
    spec.step.objective = cfg.objective;
    spec.step.scheme = scheme.scheme;
    spec.step.signaling = scheme.signaling;
    spec.step.budgets.assign(sc.cells, std::pow(10.0, power_dbw / 10.0));
    spec.step.power = cfg.power;
    if (target > 0.0)
        spec.step.thresholds.assign(sc.cells, std::vector<double>(sc.users_per_cell, target));
    return {std::move(fading), std::move(hw), std::move(spec), std::move(ao)};
}

void score(const ExperimentConfig &cfg, TrialRecord &rec)
{
    rec.feasible = rec.trace.feasible;
    rec.converged = rec.trace.converged;
    if (rec.feasible)
    {
        rec.value = headline_metric(cfg.objective, rec.trace);
        rec.status = rec.converged ? "ok" : "not converged";
    }
    else
    {
        rec.value = std::numeric_limits<double>::quiet_NaN();
        rec.status = "infeasible";
    }
}

void fail(TrialRecord &rec, const std::exception &e)
{
    rec.value = std::numeric_limits<double>::quiet_NaN();
    rec.feasible = false;
    rec.status = std::string("error: ") + e.what();
}

// A set run that can warm-start from, or hand over to, another set.
bool nestable(const SchemeConfig &s)
{
    return s.ris != "none" && s.ris != "STAR" && !s.random_theta;
}

bool same_except_ris(const SchemeConfig &a, const SchemeConfig &b)
{
    return a.signaling == b.signaling && a.scheme == b.scheme && a.iqi_aware == b.iqi_aware &&
           a.random_theta == b.random_theta;
}

} // namespace

TrialRecord run_trial(const ExperimentConfig &cfg, const SchemeConfig &scheme, double sweep_value, int trial)
{
    if (cfg.nested_sets && nestable(scheme))
    {
        RisSetParams own = cfg.ris_set;
        own.kind = set_kind_of(scheme.ris);
        std::vector<SchemeConfig> group;
        for (const auto &s : cfg.schemes)
        {
            if (!nestable(s) || !same_except_ris(s, scheme) || s.ris == scheme.ris)
                continue;
            RisSetParams p = cfg.ris_set;
            p.kind = set_kind_of(s.ris);
            if (set_contains(own, p))
                group.push_back(s);
        }
        if (!group.empty())
        {
            group.push_back(scheme);
            return run_trial_sets(cfg, group, sweep_value, trial, true).back();
        }
    }

    TrialRecord rec;
    rec.trial = trial;
    rec.seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    try
    {
        const TrialSetup t = setup_trial(cfg, scheme, sweep_value, rec.seed);
        rec.trace = run_ao(t.spec, t.fading, t.hw, t.ao);
        score(cfg, rec);
    }
    catch (const std::exception &e)
    {
        fail(rec, e);
    }
    return rec;
}

std::vector<TrialRecord> run_trial_sets(const ExperimentConfig &cfg, const std::vector<SchemeConfig> &schemes,
                                        double sweep_value, int trial, bool nested)
{
    if (schemes.empty())
        throw std::invalid_argument("run_trial_sets: no schemes");
    for (const auto &s : schemes)
        if (!nestable(s) || !same_except_ris(s, schemes.front()))
            throw std::invalid_argument("run_trial_sets: schemes must differ only in an optimized, reflect-only "
                                        "RIS set; got " + s.label());

    std::vector<TrialRecord> recs(schemes.size());
    const std::uint64_t seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    for (auto &r : recs)
    {
        r.trial = trial;
        r.seed = seed;
    }
    try
    {
        const TrialSetup t = setup_trial(cfg, schemes.front(), sweep_value, seed);
        std::vector<RisSetParams> sets;
        for (const auto &s : schemes)
        {
            sets.push_back(cfg.ris_set);
            sets.back().kind = set_kind_of(s.ris);
        }
        std::vector<RunTrace> traces;
        if (nested)
            traces = run_ao_nested(t.spec, t.fading, t.hw, t.ao, sets);
        else
            for (const auto &set : sets)
            {
                AoOptions ao = t.ao;
                ao.set = set;
                traces.push_back(run_ao(t.spec, t.fading, t.hw, ao));
            }
        for (std::size_t i = 0; i < recs.size(); ++i)
        {
            recs[i].trace = std::move(traces[i]);
            score(cfg, recs[i]);
        }
    }
    catch (const std::exception &e)
    {
        for (auto &r : recs)
            fail(r, e);
    }
    return recs;
}

namespace
{

void summarize(ResultRow &row)
{
    std::vector<double> v;
    for (const auto &t : row.trials)
        if (std::isfinite(t.value))
            v.push_back(t.value);
    row.n = static_cast<int>(v.size());
    row.mean = row.n ? std::accumulate(v.begin(), v.end(), 0.0) / row.n : std::numeric_limits<double>::quiet_NaN();
    row.stderr_ = 0.0;
    if (row.n >= 2)
    {
        double ss = 0.0;
        for (double x : v)
            ss += (x - row.mean) * (x - row.mean);
        row.stderr_ = std::sqrt(ss / (row.n - 1) / row.n);
    }
}

} // namespace

ResultTable run_experiment(const ExperimentConfig &cfg)
{
    cfg.validate();
    ResultTable table;
    table.axis = cfg.axis;
    table.metric = cfg.objective == ObjectiveKind::mwrm        ? "min_rate"
                   : cfg.objective == ObjectiveKind::power_min ? "total_power"
                                                               : to_string(cfg.objective);
    for (const auto &s : cfg.schemes)
        for (double v : cfg.sweep_values)
        {
            ResultRow row;
            row.scheme = s.label();
            row.sweep_value = v;
            row.trials.resize(cfg.trials);
            table.rows.push_back(std::move(row));
        }

    // Each task owns one preallocated slot, so completion order is irrelevant.
    const std::size_t points = cfg.sweep_values.size();
    const std::size_t tasks = table.rows.size() * static_cast<std::size_t>(cfg.trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks; i = next++)
        {
            const std::size_t r = i / cfg.trials;
            const int trial = static_cast<int>(i % cfg.trials);
            const SchemeConfig &scheme = cfg.schemes[r / points];
            table.rows[r].trials[trial] = run_trial(cfg, scheme, table.rows[r].sweep_value, trial);
        }
    };
    const int threads = std::min<int>(cfg.threads, static_cast<int>(std::max<std::size_t>(tasks, 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();

    for (auto &row : table.rows)
        summarize(row);
    return table;
}

std::filesystem::path emit_plot_data(const ResultTable &table, const std::filesystem::path &dir)
{
    if (table.rows.empty())
        throw std::invalid_argument("emit_plot_data: empty result table");
    std::vector<const ResultRow *> rows;
    for (const auto &r : table.rows)
        rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow *a, const ResultRow *b) {
        return a->scheme != b->scheme ? a->scheme < b->scheme : a->sweep_value < b->sweep_value;
    });
    std::filesystem::create_directories(dir);
    const auto path = dir / "results.csv";
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("emit_plot_data: cannot write " + path.string());
    out.precision(17);
    out << "scheme,sweep_value,mean,stderr,n\n";
    for (const auto *r : rows)
        out << r->scheme << ',' << r->sweep_value << ',' << r->mean << ',' << r->stderr_ << ',' << r->n << '\n';
    if (!out)
        throw std::runtime_error("emit_plot_data: write failed for " + path.string());
    return path;
}

void write_archive(const ResultTable &table, const ExperimentConfig &cfg, const std::filesystem::path &dir)
{
    using nlohmann::json;
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    std::filesystem::create_directories(dir);
    json summary;
    summary["version"] = kVersion;
    summary["metric"] = table.metric;
    summary["axis"] = to_string(table.axis);
    summary["config"] = cfg.echo;
    summary["rows"] = json::array();
    if (cfg.save_traces)
        std::filesystem::create_directories(dir / "traces");
    for (std::size_t r = 0; r < table.rows.size(); ++r)
    {
        const auto &row = table.rows[r];
        json jr{{"scheme", row.scheme}, {"sweep_value", row.sweep_value}, {"mean", num(row.mean)},
                {"stderr", num(row.stderr_)}, {"n", row.n}};
        for (const auto &t : row.trials)
        {
            jr["trials"].push_back(
                {{"trial", t.trial}, {"seed", t.seed}, {"value", num(t.value)}, {"status", t.status}});
            if (!cfg.save_traces)
                continue;
            std::ostringstream name;
            name << row.scheme << "_p" << (r % cfg.sweep_values.size()) << "_t" << t.trial << ".json";
            std::ofstream tf(dir / "traces" / name.str());
            auto body = json::parse(t.trace.to_json());
            body["scheme"] = row.scheme;
            body["sweep_value"] = row.sweep_value;
            body["status"] = t.status;
            body["seed"] = t.seed;
            tf << body.dump(2) << '\n';
        }
        summary["rows"].push_back(jr);
    }
    std::ofstream out(dir / "summary.json");
    if (!out)
        throw std::runtime_error("write_archive: cannot write summary.json");
    out << summary.dump(2) << '\n';
}

} // namespace rsris
