/*
Copyright 2026 The HetSched Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hetsched/analysis.hpp"
#include "hetsched/model.hpp"
#include "hetsched/sim.hpp"
#include "hetsched/time.hpp"

namespace hetsched {

/// Deterministic RNG wrapper. Distribution shaping is done here by hand so
/// that sequences depend only on the mt19937_64 stream, not on library
/// implementation details of std distributions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform integer in [lo, hi], inclusive, by rejection.
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        if (lo > hi)
            raise(Errc::invalid_state, "uniform with empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0)
            return static_cast<std::int64_t>(next_u64()); // full 64-bit range
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

    /// Exponential with the given mean, in integer ns, at least 1.
    std::int64_t exponential_ns(std::int64_t mean_ns) {
        double u = unit();
        if (u >= 1.0)
            u = 0.9999999999999999;
        const double v = -static_cast<double>(mean_ns) * std::log1p(-u);
        std::int64_t r = std::llround(v);
        return r < 1 ? 1 : r;
    }

  private:
    std::mt19937_64 eng_;
};

/// Serialized trace row: arrival, template reference by name, criticality,
/// deadline. The template definitions live in a catalog file; a trace file
/// alone does not carry DAG shapes.
struct TraceEntry {
    TimeStamp arrival;
    std::string dag_type;
    int criticality{1};
    Duration deadline;
};

struct Trace {
    std::vector<TraceEntry> entries;
};

enum class Scenario : std::int8_t { rural, semi_urban, urban };

inline const char *scenario_name(Scenario s) {
    switch (s) {
    case Scenario::rural: return "rural";
    case Scenario::semi_urban: return "semi-urban";
    case Scenario::urban: return "urban";
    }
    return "?";
}

inline Scenario scenario_from_name(const std::string &s) {
    if (s == "rural")
        return Scenario::rural;
    if (s == "semi-urban" || s == "semi_urban" || s == "semi")
        return Scenario::semi_urban;
    if (s == "urban")
        return Scenario::urban;
    raise(Errc::config_error, "unknown scenario '" + s + "'");
}

/// Fraction of crit=2 arrivals per congestion scenario.
inline double crit2_fraction(Scenario s) {
    switch (s) {
    case Scenario::rural: return 0.10;
    case Scenario::semi_urban: return 0.20;
    case Scenario::urban: return 0.50;
    }
    return 0.0;
}

enum class ArrivalDist : std::int8_t { exponential, periodic };

struct ScenarioSpec {
    Scenario scenario{Scenario::urban};
    std::int64_t n_dags{1000};
    Duration mean_interarrival{Duration::from_us(1000)};
    ArrivalDist distribution{ArrivalDist::exponential};
    Rational speed_multiplier{1};
};

enum class AppId : std::int8_t { synthetic, adsuite, mapping3d, delivery };

inline const char *app_name(AppId a) {
    switch (a) {
    case AppId::synthetic: return "synthetic";
    case AppId::adsuite: return "adsuite";
    case AppId::mapping3d: return "mapping3d";
    case AppId::delivery: return "delivery";
    }
    return "?";
}

inline AppId app_from_name(const std::string &s) {
    if (s == "synthetic")
        return AppId::synthetic;
    if (s == "adsuite")
        return AppId::adsuite;
    if (s == "mapping3d")
        return AppId::mapping3d;
    if (s == "delivery")
        return AppId::delivery;
    raise(Errc::unknown_app, "unknown application '" + s + "'");
}

struct SyntheticConfig {
    std::int32_t pool_size{16};
    std::int32_t min_nodes{5};
    std::int32_t max_nodes{10};
};

/// A generated trace plus the template definitions it references (for
/// synthetic pools these are freshly generated and must be saved alongside
/// the trace to make it runnable later).
struct GeneratedTrace {
    Trace trace;
    std::vector<DagTemplate> templates;
};

namespace detail {

/// Draws the arrival entries given per-template deadlines.
inline Trace draw_entries(Rng &rng, const ScenarioSpec &spec,
                          const std::vector<std::string> &names,
                          const std::vector<Duration> &deadlines) {
    Trace t;
    const double frac = crit2_fraction(spec.scenario);
    TimeStamp at = TimeStamp::zero();
    for (std::int64_t i = 0; i < spec.n_dags; ++i) {
        std::int64_t base = spec.distribution == ArrivalDist::exponential
                                ? rng.exponential_ns(spec.mean_interarrival.ns)
                                : spec.mean_interarrival.ns;
        std::int64_t delta = (Rational(base) / spec.speed_multiplier).round_to_int64();
        if (delta < 1)
            delta = 1;
        at += Duration{delta};
        const auto pick = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(names.size()) - 1));
        const bool crit = rng.bernoulli(frac);
        t.entries.push_back({at, names[pick], crit ? 2 : 1, deadlines[pick]});
    }
    return t;
}

/// Rejects templates whose deadline cannot be met even at best-case speed.
inline void check_deadline_floor(const DagAnalysis &a, Duration deadline, const std::string &name) {
    Duration bcet_cp = Duration::zero();
    for (std::int32_t n : a.paths[a.critical_path_index].nodes)
        bcet_cp += a.bcet[static_cast<std::size_t>(n)];
    if (deadline < bcet_cp)
        raise(Errc::invalid_state,
              "template '" + name + "' deadline below its best-case critical path");
}

} // namespace detail

/// Synthetic workload: a seeded pool of random 5-to-10-node templates over
/// the fft/conv/decoder kinds, deadline = critical-path time. Arrival
/// stream, template picks and criticality flips all derive from `seed`.
inline GeneratedTrace gen_synthetic(const KindTable &kinds, const ScenarioSpec &spec,
                                    std::uint64_t seed, const SyntheticConfig &cfg = {}) {
    Rng rng(seed);
    const KindId pool_kinds[3] = {kinds.id_of("fft"), kinds.id_of("conv"), kinds.id_of("decoder")};

    GeneratedTrace out;
    std::vector<std::string> names;
    std::vector<Duration> deadlines;
    for (std::int32_t i = 0; i < cfg.pool_size; ++i) {
        DagTemplate tmpl;
        tmpl.name = "syn" + std::to_string(seed % 100000) + "_" + std::to_string(i);
        const std::int64_t n = rng.uniform(cfg.min_nodes, cfg.max_nodes);
        for (std::int64_t node = 0; node < n; ++node)
            tmpl.nodes.push_back({node, pool_kinds[rng.uniform(0, 2)]});
        for (std::int64_t node = 1; node < n; ++node) {
            // Occasionally an extra source in the first half; otherwise 1-3
            // distinct parents among earlier nodes.
            if (node * 2 <= n && rng.uniform(0, 5) == 0)
                continue;
            const std::int64_t want = rng.uniform(1, std::min<std::int64_t>(node, 3));
            std::vector<std::int64_t> parents;
            while (static_cast<std::int64_t>(parents.size()) < want) {
                std::int64_t p = rng.uniform(0, node - 1);
                bool dup = false;
                for (std::int64_t q : parents)
                    dup = dup || q == p;
                if (!dup)
                    parents.push_back(p);
            }
            for (std::int64_t p : parents)
                tmpl.edges.push_back({p, node});
        }
        DagStructure s = validate_dag(tmpl, kinds);
        DagAnalysis a = analyze(s, kinds);
        detail::check_deadline_floor(a, a.critical_path_wcet, tmpl.name);
        names.push_back(tmpl.name);
        deadlines.push_back(a.critical_path_wcet);
        out.templates.push_back(std::move(tmpl));
    }
    out.trace = detail::draw_entries(rng, spec, names, deadlines);
    return out;
}

/// Application trace over a catalog of templates. Deadline rule: 100 ms per
/// critical-path task for the driving pipeline, critical-path time for the
/// drone pipelines.
inline GeneratedTrace gen_app_trace(AppId app, const KindTable &kinds,
                                    const std::vector<DagTemplate> &catalog,
                                    const ScenarioSpec &spec, std::uint64_t seed) {
    if (app == AppId::synthetic)
        raise(Errc::unknown_app, "synthetic traces use gen_synthetic");
    if (catalog.empty())
        raise(Errc::config_error, "empty template catalog");
    Rng rng(seed);
    GeneratedTrace out;
    std::vector<std::string> names;
    std::vector<Duration> deadlines;
    for (const DagTemplate &tmpl : catalog) {
        DagStructure s = validate_dag(tmpl, kinds);
        DagAnalysis a = analyze(s, kinds);
        Duration deadline = app == AppId::adsuite
                                ? Duration::from_ms(100) * a.critical_path_length
                                : a.critical_path_wcet;
        detail::check_deadline_floor(a, deadline, tmpl.name);
        names.push_back(tmpl.name);
        deadlines.push_back(deadline);
        out.templates.push_back(tmpl);
    }
    out.trace = detail::draw_entries(rng, spec, names, deadlines);
    return out;
}

/// Rescales arrival times by 1/multiplier (faster vehicle, denser stream).
/// Deadlines optionally tighten by the same factor (off by default so the
/// safe-speed search varies one factor at a time).
inline Trace scale_trace(const Trace &base, Rational multiplier, bool tighten_deadlines = false) {
    if (!multiplier.is_positive())
        raise(Errc::config_error, "speed multiplier must be positive");
    Trace out;
    out.entries.reserve(base.entries.size());
    for (const TraceEntry &e : base.entries) {
        TraceEntry n = e;
        n.arrival = TimeStamp{(Rational(e.arrival.ns) / multiplier).round_to_int64()};
        if (tighten_deadlines) {
            n.deadline = Duration{(Rational(e.deadline.ns) / multiplier).round_to_int64()};
            if (n.deadline.ns <= 0)
                n.deadline = Duration{1};
        }
        out.entries.push_back(std::move(n));
    }
    return out;
}

/// Maps template names to ids against a workload and checks monotonicity.
inline std::vector<ResolvedEntry> resolve_trace(const Trace &trace, const Workload &workload) {
    std::vector<ResolvedEntry> out;
    out.reserve(trace.entries.size());
    TimeStamp prev = TimeStamp::zero();
    for (std::size_t i = 0; i < trace.entries.size(); ++i) {
        const TraceEntry &e = trace.entries[i];
        if (i > 0 && e.arrival < prev)
            raise(Errc::non_monotone_trace, "entry " + std::to_string(i) + " arrives out of order");
        prev = e.arrival;
        if (e.criticality != 1 && e.criticality != 2)
            raise(Errc::parse_error, "entry " + std::to_string(i) + " has criticality outside {1,2}");
        out.push_back({e.arrival, workload.template_id(e.dag_type),
                       e.criticality == 2 ? Criticality::critical : Criticality::normal,
                       e.deadline});
    }
    return out;
}

/// JSON-lines writers/readers. Writing is hand-formatted with a fixed key
/// order so identical traces serialize byte-identically.
inline std::string trace_line(const TraceEntry &e) {
    std::string s = "{\"arrival_ns\":";
    s += std::to_string(e.arrival.ns);
    s += ",\"dag_type\":\"";
    s += e.dag_type;
    s += "\",\"criticality\":";
    s += std::to_string(e.criticality);
    s += ",\"deadline_ns\":";
    s += std::to_string(e.deadline.ns);
    s += "}";
    return s;
}

inline void save_trace(const Trace &trace, const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        raise(Errc::io_error, "cannot open '" + path + "' for writing");
    for (const TraceEntry &e : trace.entries)
        f << trace_line(e) << "\n";
    if (!f)
        raise(Errc::io_error, "write failed on '" + path + "'");
}

// load_trace lives in config.hpp with the other JSON readers.

} // namespace hetsched
