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

#ifndef RSRIS_EXPERIMENT_HPP
#define RSRIS_EXPERIMENT_HPP

#include "rsris/framework.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rsris
{

inline constexpr const char *kVersion = "0.3.0";

struct ScenarioConfig
{
    int cells = 2;
    int users_per_cell = 2;
    int bs_antennas = 2;
    int user_antennas = 2;
    int ris_elements = 20;
    double user_square_side = 20.0;
    FadingParams fading;
    double iqi_epsilon = 1.0; // same impairment on every BS and user antenna
    double iqi_phi_deg = 0.0;
};

// One entry of the scheme matrix.
struct SchemeConfig
{
    Signaling signaling = Signaling::improper;
    Scheme scheme = Scheme::rs;
    std::string ris = "I";       // U, I, C, D, STAR or none
    bool random_theta = false;   // skip the RIS step
    bool iqi_aware = true;

    std::string label() const;   // e.g. IGS-RS-I, PGS-TIN-none-unaware
};

enum class SweepAxis
{
    power_dbw,
    target_rate,
    bs_antennas,
    users_per_cell,
    ris_elements
};

const char *to_string(SweepAxis a);

struct ExperimentConfig
{
    ScenarioConfig scenario;
    std::vector<SchemeConfig> schemes;
    RisSetParams ris_set; // kind overridden per scheme
    // Start each RIS-set run from the best run over a set it contains (same
    // trial, otherwise identical scheme), e.g. U from I, C and D.
    bool nested_sets = false;

    ObjectiveKind objective = ObjectiveKind::mwrm;
    double power_dbw = 10.0;  // per-BS budget unless swept
    double target_rate = 0.0; // per-user threshold, b/s/Hz
    PowerModel power;
    ConvergenceCriteria convergence;

    SweepAxis axis = SweepAxis::power_dbw;
    std::vector<double> sweep_values{10.0};

    int trials = 10;
    std::uint64_t seed = 1;
    int threads = 1;
    bool save_traces = true;

    // Resolved key/value pairs, echoed into summary.json.
    std::map<std::string, std::string> echo;

    void validate() const;
};

/// Reads an INI file. Unknown sections or keys are rejected with the nearest valid key.
ExperimentConfig validate_config(const std::filesystem::path &path);
ExperimentConfig parse_config(const std::string &text);

struct TrialRecord
{
    int trial = 0;
    std::uint64_t seed = 0;
    double value = 0.0; // headline metric (NaN when the run failed)
    bool feasible = true;
    bool converged = false;
    std::string status; // "ok" or the failure reason
    RunTrace trace;
};

struct ResultRow
{
    std::string scheme;
    double sweep_value = 0.0;
    std::vector<TrialRecord> trials;
    double mean = 0.0;   // over trials with a finite value
    double stderr_ = 0.0;
    int n = 0;
};

struct ResultTable
{
    std::string metric; // name of the headline metric
    SweepAxis axis = SweepAxis::power_dbw;
    std::vector<ResultRow> rows;
};

/// 64-bit mix of (base, trial) used as the per-trial scenario seed.
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial);

/// Headline metric of a run: fairness (minimum) rate for MWRM, total power for
/// power minimization, the objective otherwise.
double headline_metric(ObjectiveKind kind, const RunTrace &t);

/// One trial of one scheme at one sweep point.
TrialRecord run_trial(const ExperimentConfig &cfg, const SchemeConfig &scheme, double sweep_value, int trial);

/// Schemes that differ only in the (reflect-only, optimized) RIS set, run on one
/// realization. With `nested`, see run_ao_nested; records follow `schemes`.
std::vector<TrialRecord> run_trial_sets(const ExperimentConfig &cfg, const std::vector<SchemeConfig> &schemes,
                                        double sweep_value, int trial, bool nested);

ResultTable run_experiment(const ExperimentConfig &cfg);

/// results.csv with columns scheme,sweep_value,mean,stderr,n, sorted by scheme then sweep value.
std::filesystem::path emit_plot_data(const ResultTable &table, const std::filesystem::path &dir);

/// summary.json (table, config echo, version) and traces/*.json.
void write_archive(const ResultTable &table, const ExperimentConfig &cfg, const std::filesystem::path &dir);

} // namespace rsris

#endif
