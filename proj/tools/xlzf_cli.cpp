// SPDX-License-Identifier: Apache-2.0
//
// xlzf: low-complexity zero-forcing precoding for XL-MIMO downlinks
// Copyright (C) 2026 The xlzf Authors
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

// xlzf command-line driver: Monte Carlo experiments and single-scenario runs, CSV output.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "xlzf/xlzf.hpp"

namespace
{

struct Options
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out;
    std::string schemes;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    bool dump_grouping = false;
    bool desk = false;
    std::string trial_dump;
    std::string channel_dump;
};

class RuntimeFailure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

void add_common(CLI::App *cmd, Options &o)
{
    cmd->add_option("--config", o.config, "Scenario file (key = value, ScenarioParams field names)");
    cmd->add_option("--seed", o.seed, "Master seed (overrides the config file)");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials per grid point")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "Output CSV path (default: stdout)");
    cmd->add_option("--schemes", o.schemes, "Comma-separated subset of ZF,ZF-ortho,MZF,TZF-ortho");
    cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--dump-grouping", o.dump_grouping, "Print each trial's grouping report to stderr");
    cmd->add_flag("--desk", o.desk, "Desk-scale preset: 16x12 array, 6 users, 200 trials");
}

xlzf::ScenarioParams load_params(const Options &o)
{
    xlzf::ScenarioParams p = o.desk ? xlzf::ScenarioParams::desk() : xlzf::ScenarioParams{};
    if (!o.config.empty())
    {
        std::ifstream in(o.config);
        if (!in)
            throw RuntimeFailure("cannot open config file '" + o.config + "'");
        p = xlzf::parse_config(in, p);
    }
    if (o.seed)
        p.master_seed = *o.seed;
    if (o.trials)
        p.trials = *o.trials;
    if (!o.schemes.empty())
        p.schemes = xlzf::parse_scheme_list("schemes", o.schemes);
    p.validate();
    return p;
}

// Owns the output stream: a file when a path is given, stdout otherwise.
class Output
{
public:
    explicit Output(const std::string &path) : path_(path)
    {
        if (!path.empty())
        {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw RuntimeFailure("cannot open output file '" + path + "'");
        }
    }

    std::ostream &stream() { return file_ ? static_cast<std::ostream &>(*file_) : std::cout; }

    void finish()
    {
        stream().flush();
        if (!stream())
            throw RuntimeFailure("write failed for '" + (path_.empty() ? std::string("<stdout>") : path_) + "'");
    }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
};

void write_meta(const Options &o, const xlzf::ScenarioParams &p, const std::string &command,
                const std::vector<xlzf::GridPointResult> *points)
{
    if (o.out.empty())
        return;
    Output meta(o.out + ".meta");
    auto &os = meta.stream();
    os << "command = " << command << '\n';
    os << "master_seed = " << p.master_seed << '\n';
    os << "trials = " << p.trials << '\n';
    os << "m_h = " << p.m_h << "\nm_v = " << p.m_v << "\nu = " << p.u << '\n';
    os << "median_pooling = users_x_trials\n";
    if (points)
    {
        os << "grid =";
        for (const auto &pt : *points)
            os << ' ' << xlzf::format_exact(pt.value);
        os << '\n';
    }
    meta.finish();
}

void dump_groupings(const Options &o, const std::vector<xlzf::TrialRecord> &trials)
{
    if (!o.dump_grouping)
        return;
    for (const auto &t : trials)
    {
        std::cerr << "# grid " << t.grid_point << " trial " << t.trial << '\n';
        if (t.grouping_ok)
            std::cerr << t.grouping_report;
        else
            std::cerr << "  infeasible: " << t.grouping_error << '\n';
    }
}

int run_experiment(const std::string &name, const Options &o)
{
    const auto params = load_params(o);
    std::vector<xlzf::GridPointResult> points;
    std::string column;
    if (name == "exp1")
    {
        points = xlzf::experiment_distance(params, o.workers);
        column = "d_half_wl";
    }
    else if (name == "exp2")
    {
        points = xlzf::experiment_spread(params, o.workers);
        column = "sigma_deg";
    }
    else
        points = xlzf::experiment_clusters(params, o.workers);

    for (const auto &pt : points)
        dump_groupings(o, pt.trials);

    Output out(o.out);
    if (name == "exp3")
        xlzf::write_sum_rate_csv(out.stream(), points);
    else
        xlzf::write_median_csv(out.stream(), column, points);
    out.finish();

    if (!o.trial_dump.empty())
    {
        if (name == "exp3")
            throw RuntimeFailure("--trial-dump applies to exp1 and exp2 (exp3 output is already per trial)");
        Output dump(o.trial_dump);
        xlzf::write_sinr_dump(dump.stream(), column, points);
        dump.finish();
    }
    write_meta(o, params, name, &points);
    return 0;
}

int run_single(const Options &o)
{
    const auto params = load_params(o);
    const auto trials = xlzf::run_trials(params, 0, o.workers);
    dump_groupings(o, trials);

    Output out(o.out);
    xlzf::write_run_csv(out.stream(), trials);
    out.finish();

    if (!o.channel_dump.empty())
    {
        Output dump(o.channel_dump);
        xlzf::write_channel_dump(dump.stream(), xlzf::trial_channel(params, trials.front().seed));
        dump.finish();
    }
    write_meta(o, params, "run", nullptr);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"xlzf: ZF / MZF / TZF precoding experiments for XL-MIMO downlinks"};
    app.require_subcommand(1);

    Options opts;
    auto *exp1 = app.add_subcommand("exp1", "Median SINR versus distance parameter d");
    auto *exp2 = app.add_subcommand("exp2", "Median SINR versus intra-cluster elevation spread");
    auto *exp3 = app.add_subcommand("exp3", "Per-trial sum-rate versus number of elevation clusters");
    auto *run = app.add_subcommand("run", "Per-trial metrics for a single scenario");
    for (auto *cmd : {exp1, exp2, exp3, run})
        add_common(cmd, opts);
    for (auto *cmd : {exp1, exp2})
        cmd->add_option("--trial-dump", opts.trial_dump, "Write per-user SINRs behind the medians to this CSV");
    run->add_option("--dump-channel", opts.channel_dump, "Write trial 0's exact channel matrix to this file");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 2;
    }

    try
    {
        if (run->parsed())
            return run_single(opts);
        for (auto *cmd : {exp1, exp2, exp3})
            if (cmd->parsed())
                return run_experiment(cmd->get_name(), opts);
    }
    catch (const xlzf::ConfigError &e)
    {
        std::cerr << "xlzf: invalid configuration: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "xlzf: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
