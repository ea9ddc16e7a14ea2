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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace rsris;

namespace
{

const char *kSmall = R"(
[scenario]
users_per_cell = 2
bs_antennas = 1
user_antennas = 1
ris_elements = 4

[schemes]
signaling = IGS, PGS
scheme = RS
ris = I

[objective]
kind = MWRM
max_iterations = 8

[sweep]
axis = power_dbw
values = 0, 10

[run]
trials = 2
seed = 5
save_traces = true
)";

std::filesystem::path scratch(const std::string &name)
{
    const auto p = std::filesystem::temp_directory_path() / ("rsris_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::string message_of(const std::string &text)
{
    try
    {
        parse_config(text);
    }
    catch (const std::invalid_argument &e)
    {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Config, Defaults)
{
    const ExperimentConfig c = parse_config("");
    EXPECT_EQ(c.scenario.cells, 2);
    EXPECT_EQ(c.scenario.users_per_cell, 2);
    EXPECT_EQ(c.trials, 10);
    EXPECT_EQ(c.objective, ObjectiveKind::mwrm);
    EXPECT_FALSE(c.schemes.empty());
    EXPECT_DOUBLE_EQ(c.ris_set.relax.epsilon_relax, 0.01);
    EXPECT_DOUBLE_EQ(c.convergence.rel_tol, 1e-4);
    EXPECT_EQ(c.convergence.max_iterations, 50);
    EXPECT_TRUE(c.convergence.extrapolate);
    EXPECT_NO_THROW(c.validate());

    EXPECT_FALSE(parse_config("[objective]\nextrapolate = false\n").convergence.extrapolate);
}

TEST(Config, SchemeMatrixIsCartesian)
{
    const ExperimentConfig c = parse_config(kSmall);
    ASSERT_EQ(c.schemes.size(), 2U);
    EXPECT_EQ(c.schemes[0].label(), "IGS-RS-I");
    EXPECT_EQ(c.schemes[1].label(), "PGS-RS-I");
    EXPECT_EQ(c.sweep_values, (std::vector<double>{0.0, 10.0}));
}

TEST(Config, Errors)
{
    EXPECT_NE(message_of("[scenario]\nusers_per_cell = 0\n").find("scenario.users_per_cell must be >= 1"),
              std::string::npos);
    const std::string typo = message_of("[scenario]\nris_elemnts = 4\n");
    EXPECT_NE(typo.find("scenario.ris_elemnts"), std::string::npos);
    EXPECT_NE(typo.find("scenario.ris_elements"), std::string::npos);
    EXPECT_NE(message_of("[scenaro]\ncells = 2\n").find("scenario"), std::string::npos);
    EXPECT_NE(message_of("[objective]\nkind = PowerMin\n").find("target_rate"), std::string::npos);
    EXPECT_NE(message_of("[sweep]\naxis = ris_elements\nvalues = 2.5\n").find("integers"), std::string::npos);
    EXPECT_NE(message_of("[schemes]\nsignaling = XGS\n"), "");
    EXPECT_THROW(validate_config("/nonexistent/rsris.ini"), std::invalid_argument);
}

TEST(Seeds, DeterministicAndDistinct)
{
    EXPECT_EQ(trial_seed(1, 0), trial_seed(1, 0));
    EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
    EXPECT_NE(trial_seed(1, 0), trial_seed(2, 0));
}

TEST(Trial, SchemesShareTheRealization)
{
    const ExperimentConfig c = parse_config(kSmall);
    const TrialRecord a = run_trial(c, c.schemes[0], 10.0, 1);
    const TrialRecord b = run_trial(c, c.schemes[1], 10.0, 1);
    EXPECT_EQ(a.seed, b.seed);
    EXPECT_EQ(a.status.rfind("error", 0), std::string::npos) << a.status;
    // same trial twice gives the same numbers
    const TrialRecord again = run_trial(c, c.schemes[0], 10.0, 1);
    EXPECT_EQ(a.value, again.value);
    // improper signaling contains proper signaling, and both start from the same Theta^0
    EXPECT_GE(a.value, b.value - 0.05 * std::abs(b.value));
}

TEST(Experiment, TableCsvAndArchive)
{
    ExperimentConfig c = parse_config(kSmall);
    c.threads = 2;
    const ResultTable t = run_experiment(c);
    ASSERT_EQ(t.rows.size(), 4U);
    EXPECT_EQ(t.metric, "min_rate");

    // identical across thread counts
    c.threads = 1;
    const ResultTable serial = run_experiment(c);
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        EXPECT_EQ(t.rows[r].mean, serial.rows[r].mean);

    const auto dir = scratch("archive");
    const auto csv = emit_plot_data(t, dir);
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "scheme,sweep_value,mean,stderr,n");
    std::vector<std::string> labels;
    while (std::getline(in, line))
        labels.push_back(line.substr(0, line.find(',')));
    EXPECT_TRUE(std::is_sorted(labels.begin(), labels.end()));
    EXPECT_EQ(labels.size(), 4U);

    write_archive(t, c, dir);
    std::ifstream sj(dir / "summary.json");
    const nlohmann::json s = nlohmann::json::parse(sj);
    EXPECT_EQ(s.at("version"), kVersion);
    ASSERT_EQ(s.at("rows").size(), 4U);
    for (const auto &row : s.at("rows"))
    {
        // the mean is recomputable from the archived trial values
        double sum = 0.0;
        int n = 0;
        for (const auto &tr : row.at("trials"))
            if (!tr.at("value").is_null())
            {
                sum += tr.at("value").get<double>();
                ++n;
            }
        ASSERT_EQ(n, row.at("n").get<int>());
        if (n > 0)
        {
            EXPECT_NEAR(sum / n, row.at("mean").get<double>(), 1e-12);
        }
    }
    EXPECT_TRUE(std::filesystem::exists(dir / "traces" / "IGS-RS-I_p1_t0.json"));
    std::filesystem::remove_all(dir);
}

TEST(Trial, NestedSets)
{
    ExperimentConfig c = parse_config(kSmall);
    c.schemes.clear();
    for (const char *r : {"U", "I", "D"})
    {
        SchemeConfig s;
        s.ris = r;
        c.schemes.push_back(s);
    }
    const auto nested = run_trial_sets(c, c.schemes, c.sweep_values.front(), 0, true);
    ASSERT_EQ(nested.size(), 3U);
    EXPECT_GE(nested[0].value, nested[1].value - 1e-9);
    EXPECT_GE(nested[1].value, nested[2].value - 1e-9);

    // the same chain through run_trial once the config asks for it
    c.nested_sets = true;
    EXPECT_EQ(run_trial(c, c.schemes[0], c.sweep_values.front(), 0).value, nested[0].value);
    EXPECT_EQ(run_trial(c, c.schemes[2], c.sweep_values.front(), 0).value, nested[2].value);

    SchemeConfig star;
    star.ris = "STAR";
    EXPECT_THROW(run_trial_sets(c, {c.schemes[0], star}, 10.0, 0, true), std::invalid_argument);
    SchemeConfig pgs = c.schemes[1];
    pgs.signaling = Signaling::proper;
    EXPECT_THROW(run_trial_sets(c, {c.schemes[0], pgs}, 10.0, 0, true), std::invalid_argument);

    EXPECT_TRUE(parse_config("[schemes]\nnested_sets = true\n").nested_sets);
    EXPECT_FALSE(parse_config("").nested_sets);
}

TEST(Experiment, EmptyTableIsRejected)
{
    EXPECT_THROW(emit_plot_data(ResultTable{}, scratch("empty")), std::invalid_argument);
}

TEST(Experiment, HeadlineMetric)
{
    RunTrace t;
    t.min_rate = 1.0;
    t.total_power = 2.0;
    t.objective = 3.0;
    EXPECT_EQ(headline_metric(ObjectiveKind::mwrm, t), 1.0);
    EXPECT_EQ(headline_metric(ObjectiveKind::power_min, t), 2.0);
    EXPECT_EQ(headline_metric(ObjectiveKind::gee, t), 3.0);
}
