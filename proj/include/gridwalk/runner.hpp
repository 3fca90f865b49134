#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gridwalk/config.hpp"
#include "gridwalk/exact.hpp"
#include "gridwalk/gbm.hpp"
#include "gridwalk/heat.hpp"
#include "gridwalk/io.hpp"
#include "gridwalk/simulate.hpp"
#include "gridwalk/stats.hpp"
#include "gridwalk/version.hpp"

namespace gridwalk {

struct RunResult {
    std::vector<std::string> files;  // final output paths, post-rename
    std::string report;              // JSON printed to standard output
};

namespace detail {

// Every CSV opens with the build identifier and the resolved config.
inline std::string csv_preamble(const ExperimentConfig& cfg) {
    return "# " + std::string(kBuildIdent) + " " + cfg.subcommand + " " +
           cfg.resolved.dump() + "\n";
}

inline void append_value(std::string& out, double v) {
    out += format_double(v);
}

// Per-path coordinates at one step, in path order (snapshot() sorts, which
// is wrong for per-path files).
inline std::vector<double> coordinates_at(const TrajectoryBatch& batch,
                                          std::int64_t k) {
    const std::int64_t w = batch.num_steps;
    std::vector<double> coord(static_cast<std::size_t>(2 * w + 1));
    for (std::int64_t i = -w; i <= w; ++i) {
        coord[static_cast<std::size_t>(i + w)] = batch.grid.point(i);
    }
    std::vector<double> values(static_cast<std::size_t>(batch.num_paths));
    for (std::int64_t p = 0; p < batch.num_paths; ++p) {
        values[static_cast<std::size_t>(p)] =
            coord[static_cast<std::size_t>(batch.state(p, k) + w)];
    }
    return values;
}

inline std::string snapshot_csv(const ExperimentConfig& cfg,
                                const TrajectoryBatch& batch, std::int64_t k) {
    const auto values = coordinates_at(batch, k);
    std::string out = csv_preamble(cfg);
    out += "path,value\n";
    out.reserve(out.size() + values.size() * 24);
    for (std::size_t p = 0; p < values.size(); ++p) {
        out += format_int(static_cast<std::int64_t>(p));
        out += ',';
        append_value(out, values[p]);
        out += '\n';
    }
    return out;
}

inline std::string histogram_csv(const ExperimentConfig& cfg,
                                 const TrajectoryBatch& batch, std::int64_t k,
                                 const HistogramBins& bins) {
    std::vector<double> edges(static_cast<std::size_t>(bins.count) + 1);
    for (std::size_t j = 0; j < edges.size(); ++j) {
        const double frac =
            static_cast<double>(j) / static_cast<double>(bins.count);
        edges[j] = bins.lo + frac * (bins.hi - bins.lo);
    }
    const Histogram hist =
        histogram(EmpiricalDistribution(coordinates_at(batch, k)), edges);
    std::string out = csv_preamble(cfg);
    out += "bin_lo,bin_hi,count,density\n";
    for (std::size_t j = 0; j < hist.counts.size(); ++j) {
        append_value(out, hist.edges[j]);
        out += ',';
        append_value(out, hist.edges[j + 1]);
        out += ',';
        out += format_int(hist.counts[j]);
        out += ',';
        append_value(out, hist.density[j]);
        out += '\n';
    }
    return out;
}

inline std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> ks) {
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

inline RunResult run_feasibility(const ExperimentConfig&,
                                 const FeasibilityJob& job) {
    const FeasibilityReport report =
        check_feasibility(job.grid, job.spec, job.lo, job.hi, job.slack);
    nlohmann::json out = {{"subcommand", "feasibility"},
                          {"feasible", report.feasible},
                          {"checked_range", {job.lo, job.hi}},
                          {"slack", job.slack}};
    if (report.first_violation) {
        out["first_violation"] = {{"index", report.first_violation->index},
                                  {"inequality", report.first_violation->inequality},
                                  {"lhs", report.first_violation->lhs},
                                  {"rhs", report.first_violation->rhs}};
    } else {
        out["first_violation"] = nullptr;
    }
    return RunResult{{}, out.dump(2) + "\n"};
}

inline RunResult run_propagate(const ExperimentConfig& cfg,
                               const PropagateJob& job) {
    const TransitionKernel kernel(job.grid, job.spec, job.slack);
    const TruncatedChain chain = build_truncated(kernel, job.n);

    std::string out = csv_preamble(cfg);
    out += "k,mean,variance,mass_at_boundary,max_recurrence_residual\n";

    Propagator prop(chain);
    double prev_mean = 0.0;
    double prev_m2 = 0.0;
    const double m_step = job.spec.mean_step;
    const double v_step = job.spec.var_step;
    for (std::int64_t k = 0; k <= job.k_max; ++k) {
        if (k > 0) prop.step();
        const auto dist = prop.distribution();
        KahanSum first, second;
        for (std::size_t j = 0; j < dist.mass.size(); ++j) {
            first.add(dist.support[j] * dist.mass[j]);
            second.add(dist.support[j] * dist.support[j] * dist.mass[j]);
        }
        const double mean = first.value();
        const double m2 = second.value();
        double residual = 0.0;
        if (k > 0) {
            const double kd = static_cast<double>(k);
            const double mean_resid = std::abs(mean - prev_mean - m_step);
            const double m2_resid = std::abs(
                m2 - prev_m2 -
                (m_step * m_step + v_step + 2.0 * m_step * m_step * (kd - 1.0)));
            residual = std::max(mean_resid, m2_resid);
        }
        out += format_int(k);
        out += ',';
        append_value(out, mean);
        out += ',';
        append_value(out, m2 - mean * mean);
        out += ',';
        append_value(out, prop.boundary_mass());
        out += ',';
        append_value(out, residual);
        out += '\n';
        prev_mean = mean;
        prev_m2 = m2;
    }

    OutputStage stage(cfg.out_dir);
    stage.add("propagate.csv", out);
    RunResult result;
    result.files = stage.commit();
    result.report = nlohmann::json{{"subcommand", "propagate"},
                                   {"written", result.files}}
                        .dump(2) +
                    "\n";
    return result;
}

inline RunResult run_simulate(const ExperimentConfig& cfg,
                              const SimulateJob& job) {
    const TransitionKernel kernel(job.grid, job.spec, job.slack);
    const TrajectoryBatch batch =
        simulate(kernel, job.k_max, job.n_paths, job.seed, job.threads);

    OutputStage stage(cfg.out_dir);
    for (std::int64_t k : sorted_unique(job.snapshots)) {
        if (job.bins) {
            stage.add("hist_k" + std::to_string(k) + ".csv",
                      histogram_csv(cfg, batch, k, *job.bins));
        } else {
            stage.add("snapshot_k" + std::to_string(k) + ".csv",
                      snapshot_csv(cfg, batch, k));
        }
    }
    RunResult result;
    result.files = stage.commit();
    result.report = nlohmann::json{{"subcommand", "simulate"},
                                   {"written", result.files}}
                        .dump(2) +
                    "\n";
    return result;
}

inline RunResult run_heat(const ExperimentConfig& cfg, const HeatJob& job) {
    OutputStage stage(cfg.out_dir);
    for (std::int64_t k : sorted_unique(job.k_list)) {
        const TemperatureProfile profile =
            temperature_profile(job.grid, job.params, job.n, k, job.slack);
        std::string out = csv_preamble(cfg);
        out += "index,x,mass,density_estimate,analytic_density,analytic_cell_mass,"
               "abs_error,point_of_interest\n";
        for (const ProfileRow& row : profile.rows) {
            out += format_int(row.index);
            out += ',';
            append_value(out, row.x);
            out += ',';
            append_value(out, row.mass);
            out += ',';
            append_value(out, row.density_estimate);
            out += ',';
            append_value(out, row.analytic_density);
            out += ',';
            append_value(out, row.analytic_cell_mass);
            out += ',';
            append_value(out, std::abs(row.mass - row.analytic_cell_mass));
            out += ',';
            out += row.point_of_interest ? '1' : '0';
            out += '\n';
        }
        stage.add("heat_profile_k" + std::to_string(k) + ".csv", out);
    }
    RunResult result;
    result.files = stage.commit();
    result.report = nlohmann::json{{"subcommand", "heat"},
                                   {"written", result.files}}
                        .dump(2) +
                    "\n";
    return result;
}

inline RunResult run_gbm(const ExperimentConfig& cfg, const GbmJob& job) {
    const TrajectoryBatch batch =
        job.schedule
            ? simulate_schedule(job.grid, *job.schedule, job.k_max, job.n_paths,
                                job.seed, job.threads, job.slack)
            : simulate(TransitionKernel(job.grid, gbm_spec(job.params), job.slack),
                       job.k_max, job.n_paths, job.seed, job.threads);

    OutputStage stage(cfg.out_dir);
    for (std::int64_t k : sorted_unique(job.snapshots)) {
        stage.add("snapshot_k" + std::to_string(k) + ".csv",
                  snapshot_csv(cfg, batch, k));
    }

    // Per-step summary over all paths, accumulated in fixed order so the
    // file does not depend on the worker count.
    const std::int64_t w = batch.num_steps;
    std::vector<double> coord(static_cast<std::size_t>(2 * w + 1));
    for (std::int64_t i = -w; i <= w; ++i) {
        coord[static_cast<std::size_t>(i + w)] = batch.grid.point(i);
    }
    std::vector<double> sum_r(static_cast<std::size_t>(w + 1), 0.0);
    std::vector<double> sum_r2(static_cast<std::size_t>(w + 1), 0.0);
    for (std::int64_t p = 0; p < batch.num_paths; ++p) {
        for (std::int64_t k = 0; k <= w; ++k) {
            const double x = coord[static_cast<std::size_t>(batch.state(p, k) + w)];
            sum_r[static_cast<std::size_t>(k)] += x;
            sum_r2[static_cast<std::size_t>(k)] += x * x;
        }
    }

    const PricePaths prices = price_paths(batch, job.params, job.path_sample);

    std::string summary = csv_preamble(cfg);
    summary +=
        "k,mean_log_return,var_log_return,law_mean,law_variance,mean_price,"
        "expected_price\n";
    const double n = static_cast<double>(batch.num_paths);
    for (std::int64_t k = 0; k <= w; ++k) {
        const std::size_t j = static_cast<std::size_t>(k);
        const double mean = sum_r[j] / n;
        const double var = sum_r2[j] / n - mean * mean;
        double law_mean;
        double law_var;
        double expected;
        if (job.schedule) {
            std::tie(law_mean, law_var) = schedule_log_return_moments(*job.schedule, k);
            expected = expected_price(*job.schedule, k);
        } else {
            const NormalLaw law = log_return_law(job.params, k);
            law_mean = law.mean;
            law_var = law.variance;
            expected = prices.expected_price[j];
        }
        summary += format_int(k);
        summary += ',';
        append_value(summary, mean);
        summary += ',';
        append_value(summary, var);
        summary += ',';
        append_value(summary, law_mean);
        summary += ',';
        append_value(summary, law_var);
        summary += ',';
        append_value(summary, prices.mean_price[j]);
        summary += ',';
        append_value(summary, expected);
        summary += '\n';
    }
    stage.add("summary.csv", summary);

    std::string paths = csv_preamble(cfg);
    paths += "path,k,price\n";
    for (std::int64_t p = 0; p < prices.sample_count; ++p) {
        for (std::int64_t k = 0; k <= w; ++k) {
            paths += format_int(p);
            paths += ',';
            paths += format_int(k);
            paths += ',';
            append_value(paths, prices.sample(p, k));
            paths += '\n';
        }
    }
    stage.add("paths.csv", paths);

    RunResult result;
    result.files = stage.commit();
    result.report = nlohmann::json{{"subcommand", "gbm"},
                                   {"written", result.files}}
                        .dump(2) +
                    "\n";
    return result;
}

/// Reads the value column of a snapshot CSV (comment and header lines are
/// skipped; the last comma-separated field of each row is the value).
inline std::vector<double> read_snapshot_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open snapshot file " + path);
    }
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const std::size_t comma = line.find_last_of(',');
        const std::string field =
            comma == std::string::npos ? line : line.substr(comma + 1);
        try {
            values.push_back(std::stod(field));
        } catch (const std::exception&) {
            continue;  // header or other non-numeric row
        }
    }
    if (values.empty()) {
        throw std::runtime_error("no samples found in " + path);
    }
    return values;
}

inline RunResult run_wasserstein(const ExperimentConfig& cfg,
                                 const WassersteinJob& job) {
    std::string out = csv_preamble(cfg);
    out += "k,w1\n";

    if (job.inline_mode) {
        const TransitionKernel kernel(job.grid, gbm_spec(job.params), job.slack);
        const TrajectoryBatch batch =
            simulate(kernel, job.k_max, job.n_paths, job.seed, job.threads);
        for (std::int64_t k : sorted_unique(job.k_list)) {
            const double w1 = wasserstein1(snapshot(batch, k),
                                           log_return_law(job.params, k), job.nodes);
            out += format_int(k);
            out += ',';
            append_value(out, w1);
            out += '\n';
        }
    } else {
        const EmpiricalDistribution dist(read_snapshot_values(job.snapshot_csv));
        const double w1 = wasserstein1(dist, job.law, job.nodes);
        out += format_int(job.k_label);
        out += ',';
        append_value(out, w1);
        out += '\n';
    }

    OutputStage stage(cfg.out_dir);
    stage.add("wasserstein.csv", out);
    RunResult result;
    result.files = stage.commit();
    result.report = nlohmann::json{{"subcommand", "wasserstein"},
                                   {"written", result.files}}
                        .dump(2) +
                    "\n";
    return result;
}

}  // namespace detail

/// Executes a validated config. Deterministic given the config's seed;
/// outputs are staged and atomically renamed, so failures leave no partial
/// files under the final names.
inline RunResult run(const ExperimentConfig& cfg) {
    return std::visit(
        [&cfg](const auto& job) -> RunResult {
            using T = std::decay_t<decltype(job)>;
            if constexpr (std::is_same_v<T, FeasibilityJob>) {
                return detail::run_feasibility(cfg, job);
            } else if constexpr (std::is_same_v<T, PropagateJob>) {
                return detail::run_propagate(cfg, job);
            } else if constexpr (std::is_same_v<T, SimulateJob>) {
                return detail::run_simulate(cfg, job);
            } else if constexpr (std::is_same_v<T, HeatJob>) {
                return detail::run_heat(cfg, job);
            } else if constexpr (std::is_same_v<T, GbmJob>) {
                return detail::run_gbm(cfg, job);
            } else {
                return detail::run_wasserstein(cfg, job);
            }
        },
        cfg.job);
}

}  // namespace gridwalk
