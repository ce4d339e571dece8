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

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "xlzf/channel.hpp"
#include "xlzf/errors.hpp"
#include "xlzf/geometry.hpp"
#include "xlzf/grouping.hpp"
#include "xlzf/metrics.hpp"
#include "xlzf/numerics.hpp"
#include "xlzf/precoders.hpp"

namespace xlzf
{

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kDegree = std::numbers::pi / 180.0;

/// The four benchmarked configurations.
enum class BenchScheme
{
    zf,       // classical ZF, all users simultaneously
    zf_ortho, // classical ZF, one slot per group
    mzf,      // mean-angle ZF, all users simultaneously
    tzf_ortho // tensor ZF, one slot per group
};

inline constexpr BenchScheme kAllSchemes[] = {BenchScheme::zf, BenchScheme::zf_ortho, BenchScheme::mzf,
                                              BenchScheme::tzf_ortho};

inline std::string_view scheme_name(BenchScheme s)
{
    switch (s)
    {
    case BenchScheme::zf:
        return "ZF";
    case BenchScheme::zf_ortho:
        return "ZF-ortho";
    case BenchScheme::mzf:
        return "MZF";
    case BenchScheme::tzf_ortho:
        return "TZF-ortho";
    }
    return "?";
}

inline std::optional<BenchScheme> parse_scheme(std::string_view name)
{
    for (BenchScheme s : kAllSchemes)
        if (scheme_name(s) == name)
            return s;
    return std::nullopt;
}

/// Reports which configuration field was rejected.
class ConfigError : public std::invalid_argument
{
public:
    ConfigError(std::string field, const std::string &what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Distance parameter d (half-wavelength units) that puts users at `meters` from the array.
inline double half_wavelengths_for(double meters, double carrier_hz)
{
    return meters / (kSpeedOfLight / carrier_hz / 2.0);
}

/// Scenario configuration. Defaults are the full-scale simulation setup; desk() shrinks the array
/// and trial count for quick runs. Angles are radians.
struct ScenarioParams
{
    int m_h = 50;
    int m_v = 40;
    int u = 20;
    double carrier_hz = 2e9;
    double noise_var = 1e-2;
    double d = half_wavelengths_for(750.0, 2e9);
    double s_az = 60.0 * kDegree;
    double s_el = 60.0 * kDegree;
    int n_c = 2;
    double sigma_g = 1.0 * kDegree;
    double theta_t0 = 2.0 * kDegree;
    int trials = 1000;
    std::uint64_t master_seed = 1;
    std::vector<BenchScheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
    double total_power = 1.0;
    ToleranceParams tol{};

    double wavelength() const { return kSpeedOfLight / carrier_hz; }

    static ScenarioParams desk()
    {
        ScenarioParams p;
        p.m_h = 16;
        p.m_v = 12;
        p.u = 6;
        p.trials = 200;
        return p;
    }

    void validate() const
    {
        if (m_h < 1)
            throw ConfigError("m_h", "must be a positive integer");
        if (m_v < 1)
            throw ConfigError("m_v", "must be a positive integer");
        if (u < 1)
            throw ConfigError("u", "must be a positive integer");
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
            throw ConfigError("carrier_hz", "must be positive");
        if (!(noise_var > 0.0) || !std::isfinite(noise_var))
            throw ConfigError("noise_var", "must be positive");
        if (!(d > 0.0) || !std::isfinite(d))
            throw ConfigError("d", "must be positive");
        if (!(s_az >= 0.0) || !std::isfinite(s_az))
            throw ConfigError("s_az", "must be non-negative");
        if (!(s_el >= 0.0) || !std::isfinite(s_el))
            throw ConfigError("s_el", "must be non-negative");
        if (n_c < 1 || n_c > u)
            throw ConfigError("n_c", "must satisfy 1 <= n_c <= u");
        if (!(sigma_g >= 0.0) || !std::isfinite(sigma_g))
            throw ConfigError("sigma_g", "must be non-negative");
        if (!(theta_t0 > 0.0) || !std::isfinite(theta_t0))
            throw ConfigError("theta_t0", "must be positive");
        if (trials < 1)
            throw ConfigError("trials", "must be a positive integer");
        if (schemes.empty())
            throw ConfigError("schemes", "must name at least one scheme");
        if (!(total_power > 0.0))
            throw ConfigError("total_power", "must be positive");
    }

    PlacementParams placement() const
    {
        return {u, n_c, d, wavelength(), s_az, s_el, sigma_g};
    }
};

/// Per-trial stream seed from (master seed, trial, grid point); splitmix64 finaliser chain.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t grid_point)
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(master) ^ trial) ^ (grid_point * 0xd1b54a32d192ed03ULL));
}

struct SchemeOutcome
{
    BenchScheme scheme = BenchScheme::zf;
    bool feasible = false;
    std::string note; // reason when infeasible
    MetricsRecord metrics;
};

struct TrialRecord
{
    int trial = 0;
    int grid_point = 0;
    std::uint64_t seed = 0;
    std::vector<SchemeOutcome> outcomes; // same order as ScenarioParams::schemes
    bool grouping_ok = false;
    std::string grouping_error;
    int n_groups = 0;
    std::vector<int> group_sizes;
    int degenerate_users = 0;
    std::string grouping_report;

    const SchemeOutcome *find(BenchScheme s) const
    {
        for (const auto &o : outcomes)
            if (o.scheme == s)
                return &o;
        return nullptr;
    }
};

/// User drop and exact channel for one trial seed.
inline ChannelSet trial_channel(const ScenarioParams &params, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const ArrayGeometry geometry = build_array(params.m_h, params.m_v, params.wavelength());
    const UserPlacement placement = sample_placement(params.placement(), rng);
    return exact_channel(placement, geometry);
}

/// place -> channel -> group -> precode -> measure, for one seeded drop.
/// Infeasible grouping and degenerate users are recorded, never thrown.
inline TrialRecord run_trial(const ScenarioParams &params, int trial_index, int grid_point = 0)
{
    TrialRecord rec;
    rec.trial = trial_index;
    rec.grid_point = grid_point;
    rec.seed = derive_seed(params.master_seed, static_cast<std::uint64_t>(trial_index),
                           static_cast<std::uint64_t>(grid_point));

    const ChannelSet channels = trial_channel(params, rec.seed);

    std::optional<Grouping> grouping;
    try
    {
        const Eigen::VectorXd &elev = channels.planewave.elevation;
        grouping = build_grouping(channels.angles, std::span<const double>(elev.data(), elev.size()),
                                  params.theta_t0);
        rec.grouping_ok = true;
        rec.n_groups = grouping->n_groups();
        rec.group_sizes = grouping->sizes;
        rec.grouping_report = grouping_report(*grouping);
    }
    catch (const InfeasibleGrouping &e)
    {
        rec.grouping_error = e.what();
    }
    catch (const InfeasiblePartition &e)
    {
        rec.grouping_error = e.what();
    }

    const PowerPolicy power{params.total_power};
    for (BenchScheme scheme : params.schemes)
    {
        SchemeOutcome out;
        out.scheme = scheme;
        const bool needs_groups = scheme != BenchScheme::zf;
        if (needs_groups && !grouping)
        {
            out.note = "grouping infeasible";
            rec.outcomes.push_back(std::move(out));
            continue;
        }
        try
        {
            PrecodeResult pre;
            UserGroups attribution;
            switch (scheme)
            {
            case BenchScheme::zf:
                pre = zf(channels.exact, power, params.tol, OnDegenerate::zero);
                break;
            case BenchScheme::zf_ortho:
                pre = zf(channels.exact, schedule_orthogonal(*grouping), Schedule::orthogonal, power, params.tol,
                         OnDegenerate::zero);
                attribution = grouping->members;
                break;
            case BenchScheme::mzf:
                pre = mzf(channels, *grouping, power, params.tol, OnDegenerate::zero);
                attribution = grouping->members;
                break;
            case BenchScheme::tzf_ortho:
                pre = tzf(channels.planewave.horizontal, channels.planewave.vertical, schedule_orthogonal(*grouping),
                          Schedule::orthogonal, power, params.tol, OnDegenerate::zero);
                attribution = grouping->members;
                break;
            }
            out.metrics = measure(channels.exact, pre, attribution, params.noise_var, std::string(scheme_name(scheme)),
                                  rec.seed);
            out.feasible = true;
            rec.degenerate_users += static_cast<int>(pre.degenerate.size());
        }
        catch (const InvalidArgument &e)
        {
            // dimension feasibility (U > M for ZF, slot > M_H for TZF)
            out.note = e.what();
        }
        rec.outcomes.push_back(std::move(out));
    }
    return rec;
}

/// Runs `params.trials` trials of one grid point on `workers` threads. The result is ordered by
/// trial index and does not depend on the worker count.
inline std::vector<TrialRecord> run_trials(const ScenarioParams &params, int grid_point, int workers)
{
    params.validate();
    const int n = params.trials;
    std::vector<TrialRecord> records(static_cast<std::size_t>(n));
    workers = std::clamp(workers, 1, std::max(n, 1));
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));

    auto body = [&](int w) {
        try
        {
            for (int t = next++; t < n; t = next++)
                records[static_cast<std::size_t>(t)] = run_trial(params, t, grid_point);
        }
        catch (...)
        {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
            next = n;
        }
    };
    if (workers == 1)
        body(0);
    else
    {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(body, w);
        for (auto &t : pool)
            t.join();
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    return records;
}

// ---- experiments ----------------------------------------------------------

/// 10 significant digits for aggregate CSV values.
inline std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// 17 significant digits, reads back to the same double.
inline std::string format_exact(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Log-spaced grid of `points` values from 10^lo to 10^hi.
inline std::vector<double> log_grid(double lo_exp, double hi_exp, int points)
{
    std::vector<double> g;
    for (int k = 0; k < points; ++k)
        g.push_back(std::pow(10.0, points == 1 ? lo_exp : lo_exp + (hi_exp - lo_exp) * k / (points - 1)));
    return g;
}

struct GridPointResult
{
    double value = 0.0; // swept parameter as reported in the CSV
    ScenarioParams params;
    std::vector<TrialRecord> trials;
};

struct MedianRow
{
    double grid_value = 0.0;
    BenchScheme scheme = BenchScheme::zf;
    double median_sinr_linear = 0.0;
    std::size_t samples = 0;
};

/// Pools per-user SINRs of every feasible trial (users x trials) per scheme and takes the median.
inline std::vector<MedianRow> median_sinr_table(const std::vector<GridPointResult> &points)
{
    std::vector<MedianRow> rows;
    for (const auto &pt : points)
        for (BenchScheme s : pt.params.schemes)
        {
            std::vector<double> pool;
            for (const auto &t : pt.trials)
                if (const auto *o = t.find(s); o && o->feasible)
                    pool.insert(pool.end(), o->metrics.per_user_sinr.begin(), o->metrics.per_user_sinr.end());
            MedianRow r;
            r.grid_value = pt.value;
            r.scheme = s;
            r.samples = pool.size();
            r.median_sinr_linear = pool.empty() ? std::nan("") : median(std::move(pool));
            rows.push_back(r);
        }
    return rows;
}

/// Runs one grid point per entry of `grid`; `configure(params, value)` applies the swept value.
template <class Configure>
std::vector<GridPointResult> run_sweep(const ScenarioParams &base, const std::vector<double> &grid,
                                       Configure configure, int workers)
{
    if (grid.empty())
        throw InvalidArgument("run_sweep: empty grid");
    std::vector<GridPointResult> out;
    for (std::size_t k = 0; k < grid.size(); ++k)
    {
        GridPointResult pt;
        pt.value = grid[k];
        pt.params = base;
        configure(pt.params, grid[k]);
        pt.params.validate();
        pt.trials = run_trials(pt.params, static_cast<int>(k), workers);
        out.push_back(std::move(pt));
    }
    return out;
}

/// Median SINR versus d (half-wavelength units), N_c = 2.
inline std::vector<GridPointResult> experiment_distance(const ScenarioParams &base, int workers,
                                                        std::vector<double> grid = log_grid(1.0, 4.0, 8))
{
    return run_sweep(base, grid, [](ScenarioParams &p, double d) { p.d = d; p.n_c = 2; }, workers);
}

/// Median SINR versus intra-cluster spread sigma (degrees), users at 750 m, N_c = 2.
inline std::vector<GridPointResult> experiment_spread(const ScenarioParams &base, int workers,
                                                      std::vector<double> grid_deg = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0})
{
    return run_sweep(
        base, grid_deg,
        [](ScenarioParams &p, double sigma_deg) {
            p.sigma_g = sigma_deg * kDegree;
            p.n_c = 2;
            p.d = half_wavelengths_for(750.0, p.carrier_hz);
        },
        workers);
}

/// Per-trial sum-rates versus number of elevation clusters, users at 750 m.
inline std::vector<GridPointResult> experiment_clusters(const ScenarioParams &base, int workers,
                                                        std::vector<double> grid = {2, 3, 4})
{
    return run_sweep(
        base, grid,
        [](ScenarioParams &p, double n_c) {
            p.n_c = static_cast<int>(n_c);
            p.d = half_wavelengths_for(750.0, p.carrier_hz);
        },
        workers);
}

// ---- CSV writers ------------------------------------------------------------

inline void write_median_csv(std::ostream &os, std::string_view grid_column, const std::vector<GridPointResult> &points)
{
    os << grid_column << ",scheme,median_sinr_db\n";
    for (const auto &r : median_sinr_table(points))
        os << format_number(r.grid_value) << ',' << scheme_name(r.scheme) << ','
           << format_number(to_db(r.median_sinr_linear)) << '\n';
}

/// Per-user SINR dump that the median tables can be recomputed from exactly.
inline void write_sinr_dump(std::ostream &os, std::string_view grid_column, const std::vector<GridPointResult> &points)
{
    os << grid_column << ",scheme,trial,user,sinr_linear\n";
    for (const auto &pt : points)
        for (BenchScheme s : pt.params.schemes)
            for (const auto &t : pt.trials)
                if (const auto *o = t.find(s); o && o->feasible)
                    for (std::size_t u = 0; u < o->metrics.per_user_sinr.size(); ++u)
                        os << format_number(pt.value) << ',' << scheme_name(s) << ',' << t.trial << ',' << u << ','
                           << format_exact(o->metrics.per_user_sinr[u]) << '\n';
}

/// Sum-rate per trial; orthogonal schemes report the time-sharing normalised rate.
inline void write_sum_rate_csv(std::ostream &os, const std::vector<GridPointResult> &points)
{
    os << "n_clusters,scheme,trial,sum_rate_bps_hz\n";
    for (const auto &pt : points)
        for (BenchScheme s : pt.params.schemes)
            for (const auto &t : pt.trials)
                if (const auto *o = t.find(s); o && o->feasible)
                    os << format_number(pt.value) << ',' << scheme_name(s) << ',' << t.trial << ','
                       << format_number(o->metrics.normalized_sum_rate) << '\n';
}

/// Long-format per-trial metrics for the `run` command.
inline void write_run_csv(std::ostream &os, const std::vector<TrialRecord> &trials)
{
    os << "scheme,metric,value,trial\n";
    for (const auto &t : trials)
        for (const auto &o : t.outcomes)
        {
            const auto name = scheme_name(o.scheme);
            auto row = [&](std::string_view metric, const std::string &value) {
                os << name << ',' << metric << ',' << value << ',' << t.trial << '\n';
            };
            if (!o.feasible)
            {
                row("status", "infeasible");
                continue;
            }
            const auto &m = o.metrics;
            row("status", "ok");
            row("n_slots", std::to_string(m.n_slots));
            row("degenerate_users", std::to_string(m.degenerate.size()));
            row("sum_rate_bps_hz", format_number(m.sum_rate));
            row("normalized_sum_rate_bps_hz", format_number(m.normalized_sum_rate));
            row("median_sinr_db", format_number(to_db(median(m.per_user_sinr))));
            for (std::size_t u = 0; u < m.per_user_sinr.size(); ++u)
                row("sinr_db_user_" + std::to_string(u), format_number(to_db(m.per_user_sinr[u])));
        }
}

} // namespace xlzf
