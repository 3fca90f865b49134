#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gridwalk/gbm.hpp"
#include "gridwalk/grid.hpp"
#include "gridwalk/heat.hpp"
#include "gridwalk/kernel.hpp"
#include "gridwalk/stats.hpp"

namespace gridwalk {

struct ConfigError {
    std::string field;
    std::string message;
};

/// Carries every validation problem found in a config, not just the first.
class config_error : public std::runtime_error {
public:
    explicit config_error(std::vector<ConfigError> errors)
        : std::runtime_error(summarize(errors)), errors_(std::move(errors)) {}

    const std::vector<ConfigError>& errors() const { return errors_; }

    nlohmann::json to_json() const {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& e : errors_) {
            list.push_back({{"field", e.field}, {"message", e.message}});
        }
        return {{"error", {{"type", "config"}, {"errors", list}}}};
    }

private:
    static std::string summarize(const std::vector<ConfigError>& errors) {
        std::ostringstream os;
        os << "invalid config (" << errors.size() << " error"
           << (errors.size() == 1 ? "" : "s") << ")";
        for (const auto& e : errors) os << "; " << e.field << ": " << e.message;
        return os.str();
    }

    std::vector<ConfigError> errors_;
};

struct HistogramBins {
    double lo = 0.0;
    double hi = 1.0;
    std::int64_t count = 1;
};

struct FeasibilityJob {
    Grid grid;
    MomentSpec spec;
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    double slack = 0.0;
};

struct PropagateJob {
    Grid grid;
    MomentSpec spec;
    std::int64_t n = 1;
    std::int64_t k_max = 0;
    double slack = 0.0;
};

struct SimulateJob {
    Grid grid;
    MomentSpec spec;
    std::int64_t n_paths = 1;
    std::int64_t k_max = 0;
    std::vector<std::int64_t> snapshots;
    std::uint64_t seed = 0;
    int threads = 1;
    std::optional<HistogramBins> bins;
    double slack = 0.0;
};

struct HeatJob {
    HeatParams params;
    Grid grid;
    std::int64_t n = 1;
    std::vector<std::int64_t> k_list;
    double slack = 0.0;
};

struct GbmJob {
    Grid grid;
    GbmParams params;
    std::optional<CoefficientSchedule> schedule;
    std::int64_t n_paths = 1;
    std::int64_t k_max = 0;
    std::vector<std::int64_t> snapshots;
    std::uint64_t seed = 0;
    int threads = 1;
    std::int64_t path_sample = 20;
    double slack = 0.0;
};

struct WassersteinJob {
    bool inline_mode = true;
    // Inline mode: simulate and compare per step.
    Grid grid;
    GbmParams params;
    std::int64_t n_paths = 1;
    std::int64_t k_max = 0;
    std::vector<std::int64_t> k_list;
    std::uint64_t seed = 0;
    int threads = 1;
    double slack = 0.0;
    // File mode: compare a stored snapshot against an explicit law.
    std::string snapshot_csv;
    NormalLaw law;
    std::int64_t k_label = 0;
    // Shared.
    int nodes = 4096;
};

/// Command-line overrides; a flag beats the config file.
struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out;
};

struct ExperimentConfig {
    std::string subcommand;
    std::string out_dir = ".";
    // Canonical config with defaults filled, recorded in every output CSV.
    // Execution-only knobs (threads, output directory) are excluded: they
    // must not change results.
    nlohmann::json resolved;
    std::variant<FeasibilityJob, PropagateJob, SimulateJob, HeatJob, GbmJob,
                 WassersteinJob>
        job;
};

namespace detail {

// Field-path aware accessor over one JSON object. Getters record problems
// instead of throwing so a single pass reports everything; unknown keys are
// rejected at finish().
class Reader {
public:
    Reader(const nlohmann::json& obj, std::string prefix,
           std::vector<ConfigError>& errors)
        : obj_(obj), prefix_(std::move(prefix)), errors_(errors) {}

    bool has(const std::string& key) const { return obj_.contains(key); }

    void fail(const std::string& key, const std::string& message) {
        errors_.push_back({path(key), message});
    }

    double number(const std::string& key, double fallback = 0.0) {
        mark(key);
        if (!obj_.contains(key)) {
            fail(key, "required number is missing");
            return fallback;
        }
        if (!obj_[key].is_number()) {
            fail(key, "must be a number");
            return fallback;
        }
        return obj_[key].get<double>();
    }

    double number_or(const std::string& key, double def) {
        if (!obj_.contains(key)) return def;
        return number(key, def);
    }

    double positive(const std::string& key) {
        const double v = number(key, 1.0);
        if (!(v > 0.0)) fail(key, "must be > 0");
        return v;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback = 0) {
        mark(key);
        if (!obj_.contains(key)) {
            fail(key, "required integer is missing");
            return fallback;
        }
        if (!obj_[key].is_number_integer()) {
            fail(key, "must be an integer");
            return fallback;
        }
        return obj_[key].get<std::int64_t>();
    }

    std::int64_t integer_or(const std::string& key, std::int64_t def) {
        if (!obj_.contains(key)) return def;
        return integer(key, def);
    }

    std::uint64_t uinteger(const std::string& key) {
        mark(key);
        if (!obj_.contains(key)) {
            fail(key, "required integer is missing");
            return 0;
        }
        if (!obj_[key].is_number_integer() ||
            (obj_[key].is_number_integer() && !obj_[key].is_number_unsigned() &&
             obj_[key].get<std::int64_t>() < 0)) {
            fail(key, "must be a nonnegative integer");
            return 0;
        }
        return obj_[key].get<std::uint64_t>();
    }

    std::string text(const std::string& key) {
        mark(key);
        if (!obj_.contains(key) || !obj_[key].is_string()) {
            fail(key, "required string is missing");
            return {};
        }
        return obj_[key].get<std::string>();
    }

    std::vector<double> number_list(const std::string& key) {
        mark(key);
        std::vector<double> out;
        if (!obj_.contains(key) || !obj_[key].is_array()) {
            fail(key, "must be an array of numbers");
            return out;
        }
        for (const auto& v : obj_[key]) {
            if (!v.is_number()) {
                fail(key, "must contain only numbers");
                return {};
            }
            out.push_back(v.get<double>());
        }
        return out;
    }

    std::vector<std::int64_t> integer_list(const std::string& key) {
        mark(key);
        std::vector<std::int64_t> out;
        if (!obj_.contains(key) || !obj_[key].is_array()) {
            fail(key, "must be an array of integers");
            return out;
        }
        for (const auto& v : obj_[key]) {
            if (!v.is_number_integer()) {
                fail(key, "must contain only integers");
                return {};
            }
            out.push_back(v.get<std::int64_t>());
        }
        return out;
    }

    const nlohmann::json* object(const std::string& key) {
        mark(key);
        if (!obj_.contains(key) || !obj_[key].is_object()) {
            fail(key, "required object is missing");
            return nullptr;
        }
        return &obj_[key];
    }

    const nlohmann::json* object_opt(const std::string& key) {
        if (!obj_.contains(key)) return nullptr;
        return object(key);
    }

    const nlohmann::json* array_opt(const std::string& key) {
        if (!obj_.contains(key)) return nullptr;
        mark(key);
        if (!obj_[key].is_array()) {
            fail(key, "must be an array");
            return nullptr;
        }
        return &obj_[key];
    }

    void mark(const std::string& key) { consumed_.insert(key); }

    void finish() {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!consumed_.contains(it.key())) {
                errors_.push_back({path(it.key()), "unknown key"});
            }
        }
    }

    std::string path(const std::string& key) const {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

private:
    const nlohmann::json& obj_;
    std::string prefix_;
    std::vector<ConfigError>& errors_;
    std::set<std::string> consumed_;
};

inline Grid parse_grid(const nlohmann::json& node, const std::string& prefix,
                       std::vector<ConfigError>& errors) {
    Reader r(node, prefix, errors);
    const std::string kind = r.text("kind");
    Grid grid;
    const std::size_t before = errors.size();
    if (kind == "uniform") {
        const double h = r.positive("h");
        if (errors.size() == before) grid = Grid::uniform(h);
    } else if (kind == "two_sided") {
        const double sn = r.positive("slope_neg");
        const double sp = r.positive("slope_pos");
        if (errors.size() == before) grid = Grid::two_sided(sn, sp);
    } else if (kind == "explicit") {
        const auto points = r.number_list("points");
        const double el = r.positive("extend_left");
        const double er = r.positive("extend_right");
        if (errors.size() == before) {
            try {
                grid = Grid::explicit_table(points, el, er);
            } catch (const std::invalid_argument& e) {
                errors.push_back({prefix + ".points", e.what()});
            }
        }
    } else if (!kind.empty()) {
        errors.push_back(
            {prefix + ".kind", "must be one of uniform, two_sided, explicit"});
    }
    r.finish();
    return grid;
}

inline nlohmann::json grid_to_json(const Grid& grid) {
    switch (grid.kind()) {
        case Grid::Kind::uniform:
            return {{"kind", "uniform"}, {"h", grid.slope_pos()}};
        case Grid::Kind::two_sided:
            return {{"kind", "two_sided"},
                    {"slope_neg", grid.slope_neg()},
                    {"slope_pos", grid.slope_pos()}};
        case Grid::Kind::explicit_table:
        default:
            return {{"kind", "explicit"},
                    {"points", grid.table()},
                    {"extend_left", grid.slope_neg()},
                    {"extend_right", grid.slope_pos()}};
    }
}

inline GbmParams parse_gbm_params(const nlohmann::json& node,
                                  const std::string& prefix,
                                  std::vector<ConfigError>& errors) {
    Reader r(node, prefix, errors);
    GbmParams p;
    p.mu = r.number("mu");
    p.sigma2 = r.positive("sigma2");
    p.s0 = r.positive("s0");
    p.tau = r.positive("tau");
    r.finish();
    return p;
}

inline HeatParams parse_heat_params(const nlohmann::json& node,
                                    const std::string& prefix,
                                    std::vector<ConfigError>& errors) {
    Reader r(node, prefix, errors);
    HeatParams p;
    p.alpha = r.positive("alpha");
    p.tau = r.positive("tau");
    if (r.has("points")) p.points_of_interest = r.number_list("points");
    r.finish();
    return p;
}

// One of "moments", "heat", "gbm" supplies the per-step moments for the
// generic subcommands. Returns the spec plus normalized JSON for the record.
inline std::pair<MomentSpec, nlohmann::json> parse_moment_source(
    Reader& r, const nlohmann::json& node, std::vector<ConfigError>& errors) {
    const int present = static_cast<int>(node.contains("moments")) +
                        static_cast<int>(node.contains("heat")) +
                        static_cast<int>(node.contains("gbm"));
    if (present != 1) {
        errors.push_back({r.path("moments"),
                          "exactly one of moments, heat, gbm must be given"});
        r.mark("moments");
        r.mark("heat");
        r.mark("gbm");
        return {MomentSpec{}, nlohmann::json::object()};
    }
    if (node.contains("moments")) {
        const auto* m = r.object("moments");
        if (m == nullptr) return {MomentSpec{}, nlohmann::json::object()};
        Reader mr(*m, r.path("moments"), errors);
        MomentSpec spec;
        spec.mean_step = mr.number("mean_step");
        spec.var_step = mr.number("var_step");
        mr.finish();
        return {spec, {{"moments",
                        {{"mean_step", spec.mean_step}, {"var_step", spec.var_step}}}}};
    }
    if (node.contains("heat")) {
        const auto* h = r.object("heat");
        if (h == nullptr) return {MomentSpec{}, nlohmann::json::object()};
        const std::size_t before = errors.size();
        const HeatParams params = parse_heat_params(*h, r.path("heat"), errors);
        if (errors.size() != before) return {MomentSpec{}, nlohmann::json::object()};
        return {heat_spec(params),
                {{"heat",
                  {{"alpha", params.alpha},
                   {"tau", params.tau},
                   {"points", params.points_of_interest}}}}};
    }
    const auto* g = r.object("gbm");
    if (g == nullptr) return {MomentSpec{}, nlohmann::json::object()};
    const std::size_t before = errors.size();
    const GbmParams params = parse_gbm_params(*g, r.path("gbm"), errors);
    if (errors.size() != before) return {MomentSpec{}, nlohmann::json::object()};
    return {gbm_spec(params),
            {{"gbm",
              {{"mu", params.mu},
               {"sigma2", params.sigma2},
               {"s0", params.s0},
               {"tau", params.tau}}}}};
}

inline nlohmann::json gbm_to_json(const GbmParams& p) {
    return {{"mu", p.mu}, {"sigma2", p.sigma2}, {"s0", p.s0}, {"tau", p.tau}};
}

}  // namespace detail

/// Parses and validates one subcommand's configuration. Collects every
/// validation problem (with field paths) before failing; unknown keys are
/// errors. CLI flag overrides beat config values.
inline ExperimentConfig parse_config(const nlohmann::json& node,
                                     const std::string& subcommand,
                                     const CliOverrides& overrides = {}) {
    using detail::Reader;
    std::vector<ConfigError> errors;
    if (!node.is_object()) {
        errors.push_back({"", "config root must be a JSON object"});
        throw config_error(std::move(errors));
    }

    ExperimentConfig cfg;
    cfg.subcommand = subcommand;
    if (overrides.out) cfg.out_dir = *overrides.out;

    Reader r(node, "", errors);
    nlohmann::json resolved;

    const auto read_seed = [&](bool required) -> std::uint64_t {
        if (overrides.seed) {
            r.mark("seed");
            return *overrides.seed;
        }
        if (node.contains("seed")) return r.uinteger("seed");
        if (required) {
            errors.push_back(
                {"seed", "required for reproducible runs (config key or --seed)"});
        }
        r.mark("seed");
        return 0;
    };
    const auto read_threads = [&]() -> int {
        int threads = 1;
        if (overrides.threads) {
            threads = *overrides.threads;
            r.mark("threads");
        } else {
            threads = static_cast<int>(r.integer_or("threads", 1));
        }
        if (threads < 1) errors.push_back({"threads", "must be >= 1"});
        return threads;
    };
    const auto read_slack = [&]() -> double {
        const double slack = r.number_or("slack", 0.0);
        if (slack < 0.0) errors.push_back({"slack", "must be >= 0"});
        resolved["slack"] = slack;
        return slack;
    };
    const auto read_grid = [&]() -> Grid {
        const auto* g = r.object("grid");
        if (g == nullptr) return Grid();
        const Grid grid = detail::parse_grid(*g, "grid", errors);
        resolved["grid"] = detail::grid_to_json(grid);
        return grid;
    };
    const auto finish = [&]() {
        r.finish();
        if (!errors.empty()) throw config_error(std::move(errors));
        cfg.resolved = std::move(resolved);
    };

    if (subcommand == "feasibility") {
        FeasibilityJob job;
        job.grid = read_grid();
        auto [spec, source_json] = detail::parse_moment_source(r, node, errors);
        job.spec = spec;
        resolved.update(source_json);
        // Run-oriented keys are tolerated so one experiment config can be
        // checked directly; only "range" and "k_max" matter here.
        for (const char* ignorable :
             {"n_paths", "snapshots", "seed", "threads", "path_sample",
              "schedule", "k_list", "nodes", "bins", "n"}) {
            r.mark(ignorable);
        }
        if (r.has("range")) {
            const auto range = r.integer_list("range");
            if (range.size() != 2) {
                r.fail("range", "must be [lo, hi]");
            } else {
                job.lo = range[0];
                job.hi = range[1];
                if (job.lo > job.hi) r.fail("range", "lo must be <= hi");
            }
            r.mark("k_max");
        } else if (r.has("k_max")) {
            // Default to the window a k_max-step run can reach.
            const std::int64_t k_max = r.integer("k_max");
            if (k_max < 0) r.fail("k_max", "must be >= 0");
            job.lo = -k_max;
            job.hi = k_max;
        } else {
            r.fail("range", "required (or give k_max for the reachable window)");
        }
        resolved["range"] = {job.lo, job.hi};
        job.slack = read_slack();
        finish();
        cfg.job = std::move(job);
        return cfg;
    }

    if (subcommand == "propagate") {
        PropagateJob job;
        job.grid = read_grid();
        auto [spec, source_json] = detail::parse_moment_source(r, node, errors);
        job.spec = spec;
        resolved.update(source_json);
        r.mark("seed");
        r.mark("threads");
        job.n = r.integer("n");
        if (job.n < 1) r.fail("n", "must be >= 1");
        job.k_max = r.integer("k_max");
        if (job.k_max < 0) r.fail("k_max", "must be >= 0");
        if (job.k_max > job.n) {
            r.fail("k_max", "must not exceed n (truncation would bias moments)");
        }
        job.slack = read_slack();
        resolved["n"] = job.n;
        resolved["k_max"] = job.k_max;
        finish();
        cfg.job = std::move(job);
        return cfg;
    }

    if (subcommand == "simulate") {
        SimulateJob job;
        job.grid = read_grid();
        auto [spec, source_json] = detail::parse_moment_source(r, node, errors);
        job.spec = spec;
        resolved.update(source_json);
        job.n_paths = r.integer("n_paths");
        if (job.n_paths < 1) r.fail("n_paths", "must be >= 1");
        job.k_max = r.integer("k_max");
        if (job.k_max < 0) r.fail("k_max", "must be >= 0");
        job.snapshots = r.integer_list("snapshots");
        for (std::int64_t k : job.snapshots) {
            if (k < 0 || k > job.k_max) {
                r.fail("snapshots", "entries must lie in [0, k_max]");
                break;
            }
        }
        job.seed = read_seed(true);
        job.threads = read_threads();
        job.slack = read_slack();
        if (const auto* b = r.object_opt("bins")) {
            Reader br(*b, "bins", errors);
            HistogramBins bins;
            bins.lo = br.number("lo");
            bins.hi = br.number("hi");
            bins.count = br.integer("count");
            if (bins.count < 1) br.fail("count", "must be >= 1");
            if (!(bins.lo < bins.hi)) br.fail("hi", "must be > lo");
            br.finish();
            job.bins = bins;
            resolved["bins"] = {{"lo", bins.lo}, {"hi", bins.hi}, {"count", bins.count}};
        }
        resolved["n_paths"] = job.n_paths;
        resolved["k_max"] = job.k_max;
        resolved["snapshots"] = job.snapshots;
        resolved["seed"] = job.seed;
        finish();
        cfg.job = std::move(job);
        return cfg;
    }

    if (subcommand == "heat") {
        HeatJob job;
        r.mark("seed");
        r.mark("threads");
        const auto* h = r.object("heat");
        if (h != nullptr) {
            job.params = detail::parse_heat_params(*h, "heat", errors);
            resolved["heat"] = {{"alpha", job.params.alpha},
                                {"tau", job.params.tau},
                                {"points", job.params.points_of_interest}};
        }
        if (node.contains("grid")) {
            job.grid = read_grid();
            r.mark("base_gap");
            if (node.contains("base_gap")) {
                r.fail("base_gap", "give either grid or base_gap, not both");
            }
        } else {
            const double base_gap = r.positive("base_gap");
            if (errors.empty()) {
                job.grid = embed_points(job.params.points_of_interest, base_gap);
                resolved["base_gap"] = base_gap;
                resolved["grid"] = detail::grid_to_json(job.grid);
            }
        }
        job.n = r.integer("n");
        if (job.n < 1) r.fail("n", "must be >= 1");
        job.k_list = r.integer_list("k_list");
        for (std::int64_t k : job.k_list) {
            if (k < 0 || k > job.n) {
                r.fail("k_list", "entries must lie in [0, n]");
                break;
            }
        }
        job.slack = read_slack();
        resolved["n"] = job.n;
        resolved["k_list"] = job.k_list;
        finish();
        cfg.job = std::move(job);
        return cfg;
    }

    if (subcommand == "gbm") {
        GbmJob job;
        job.grid = read_grid();
        const auto* g = r.object("gbm");
        if (g != nullptr) {
            job.params = detail::parse_gbm_params(*g, "gbm", errors);
            resolved["gbm"] = detail::gbm_to_json(job.params);
        }
        job.n_paths = r.integer("n_paths");
        if (job.n_paths < 1) r.fail("n_paths", "must be >= 1");
        job.k_max = r.integer("k_max");
        if (job.k_max < 1) r.fail("k_max", "must be >= 1");
        job.snapshots = r.integer_list("snapshots");
        for (std::int64_t k : job.snapshots) {
            if (k < 0 || k > job.k_max) {
                r.fail("snapshots", "entries must lie in [0, k_max]");
                break;
            }
        }
        job.path_sample = r.integer_or("path_sample", 20);
        if (job.path_sample < 0) r.fail("path_sample", "must be >= 0");
        job.seed = read_seed(true);
        job.threads = read_threads();
        job.slack = read_slack();
        if (const auto* sched = r.array_opt("schedule")) {
            std::vector<CoefficientSchedule::Segment> segments;
            for (std::size_t j = 0; j < sched->size(); ++j) {
                const std::string prefix = "schedule[" + std::to_string(j) + "]";
                if (!(*sched)[j].is_object()) {
                    errors.push_back({prefix, "must be an object"});
                    continue;
                }
                Reader sr((*sched)[j], prefix, errors);
                CoefficientSchedule::Segment seg;
                seg.start_step = sr.integer("start_step");
                seg.params = job.params;
                seg.params.mu = sr.number("mu");
                seg.params.sigma2 = sr.positive("sigma2");
                if (seg.start_step >= job.k_max && job.k_max >= 1) {
                    sr.fail("start_step", "must be < k_max");
                }
                sr.finish();
                segments.push_back(seg);
            }
            if (errors.empty()) {
                try {
                    job.schedule.emplace(std::move(segments));
                } catch (const std::invalid_argument& e) {
                    errors.push_back({"schedule", e.what()});
                }
            }
            if (job.schedule) {
                nlohmann::json sj = nlohmann::json::array();
                for (const auto& seg : job.schedule->segments()) {
                    sj.push_back({{"start_step", seg.start_step},
                                  {"mu", seg.params.mu},
                                  {"sigma2", seg.params.sigma2}});
                }
                resolved["schedule"] = sj;
            }
        }
        resolved["n_paths"] = job.n_paths;
        resolved["k_max"] = job.k_max;
        resolved["snapshots"] = job.snapshots;
        resolved["path_sample"] = job.path_sample;
        resolved["seed"] = job.seed;
        finish();
        cfg.job = std::move(job);
        return cfg;
    }

    if (subcommand == "wasserstein") {
        WassersteinJob job;
        job.nodes = static_cast<int>(r.integer_or("nodes", 4096));
        if (job.nodes < 2) r.fail("nodes", "must be >= 2");
        resolved["nodes"] = job.nodes;

        if (node.contains("snapshot_csv")) {
            job.inline_mode = false;
            job.snapshot_csv = r.text("snapshot_csv");
            const auto* law = r.object("law");
            if (law != nullptr) {
                Reader lr(*law, "law", errors);
                job.law.mean = lr.number("mean");
                job.law.variance = lr.number("variance");
                if (job.law.variance < 0.0) lr.fail("variance", "must be >= 0");
                lr.finish();
            }
            job.k_label = r.integer_or("k_label", 0);
            resolved["snapshot_csv"] = job.snapshot_csv;
            resolved["law"] = {{"mean", job.law.mean},
                               {"variance", job.law.variance}};
            resolved["k_label"] = job.k_label;
            finish();
            cfg.job = std::move(job);
            return cfg;
        }

        job.inline_mode = true;
        job.grid = read_grid();
        const auto* g = r.object("gbm");
        if (g != nullptr) {
            job.params = detail::parse_gbm_params(*g, "gbm", errors);
            resolved["gbm"] = detail::gbm_to_json(job.params);
        }
        job.n_paths = r.integer("n_paths");
        if (job.n_paths < 1) r.fail("n_paths", "must be >= 1");
        job.k_max = r.integer("k_max");
        if (job.k_max < 1) r.fail("k_max", "must be >= 1");
        job.k_list = r.integer_list("k_list");
        for (std::int64_t k : job.k_list) {
            if (k < 0 || k > job.k_max) {
                r.fail("k_list", "entries must lie in [0, k_max]");
                break;
            }
        }
        job.seed = read_seed(true);
        job.threads = read_threads();
        job.slack = read_slack();
        resolved["n_paths"] = job.n_paths;
        resolved["k_max"] = job.k_max;
        resolved["k_list"] = job.k_list;
        resolved["seed"] = job.seed;
        finish();
        cfg.job = std::move(job);
        return cfg;
    }

    errors.push_back({"subcommand", "unknown subcommand " + subcommand});
    throw config_error(std::move(errors));
}

/// Loads, parses and validates a config file.
inline ExperimentConfig load_config(const std::string& path,
                                    const std::string& subcommand,
                                    const CliOverrides& overrides = {}) {
    std::ifstream in(path);
    if (!in) {
        throw config_error({{"config", "cannot open file " + path}});
    }
    nlohmann::json node;
    try {
        node = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error({{"config", std::string("invalid JSON: ") + e.what()}});
    }
    return parse_config(node, subcommand, overrides);
}

}  // namespace gridwalk
