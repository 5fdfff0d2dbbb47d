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

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hetsched/sim.hpp"
#include "hetsched/trace.hpp"

namespace hetsched {

struct PeUtilization {
    PeId pe{kInvalidPe};
    std::string class_name;
    double utilization{0.0};
};

/// Mission-level quality summary of one run. Critical-instance statistics
/// are judged on the final (post-promotion) criticality level.
struct QomReport {
    std::string scheduler_name;
    Duration mission_time; // completion instant of the last non-pruned DAG
    TimeStamp horizon;

    std::int64_t dags_total{0};
    std::int64_t dags_met{0};
    std::int64_t dags_missed{0};
    std::int64_t dags_pruned{0};
    std::int64_t crit_total{0};
    std::int64_t crit_met{0};

    double crit_hit_rate{1.0};        // 1.0 when no critical instances arrived
    bool has_first_miss{false};
    TimeStamp first_miss;             // earliest missed critical deadline instant
    double pct_before_first_miss{100.0};

    EnergyQ32 dynamic_energy;
    EnergyQ32 static_energy;
    EnergyQ32 total_energy;
    std::vector<PeUtilization> pe_utilization;
    double avg_utilization{0.0};
};

inline QomReport qom_report(const SimResult &r) {
    QomReport q;
    q.scheduler_name = r.scheduler_name;
    q.horizon = r.horizon;
    q.dags_total = static_cast<std::int64_t>(r.dags.size());

    bool any_completion = false;
    TimeStamp last_completion = TimeStamp::zero();
    bool any_miss = false;
    TimeStamp first_miss = TimeStamp::zero();
    for (const DagOutcome &d : r.dags) {
        const bool completed = d.state == DagState::completed_met || d.state == DagState::completed_missed;
        if (completed && (!any_completion || last_completion < d.completion)) {
            any_completion = true;
            last_completion = d.completion;
        }
        switch (d.state) {
        case DagState::completed_met: ++q.dags_met; break;
        case DagState::completed_missed: ++q.dags_missed; break;
        case DagState::pruned: ++q.dags_pruned; break;
        case DagState::active: break;
        }
        if (d.criticality == Criticality::critical) {
            ++q.crit_total;
            if (d.state == DagState::completed_met)
                ++q.crit_met;
            if (d.state == DagState::completed_missed) {
                const TimeStamp miss_at = d.arrival + d.deadline;
                if (!any_miss || miss_at < first_miss) {
                    any_miss = true;
                    first_miss = miss_at;
                }
            }
        }
    }
    q.mission_time = any_completion ? last_completion - TimeStamp::zero() : Duration::zero();
    q.crit_hit_rate = q.crit_total == 0
                          ? 1.0
                          : static_cast<double>(q.crit_met) / static_cast<double>(q.crit_total);
    q.has_first_miss = any_miss;
    q.first_miss = first_miss;
    if (any_miss) {
        std::int64_t before = 0;
        for (const DagOutcome &d : r.dags) {
            const bool completed =
                d.state == DagState::completed_met || d.state == DagState::completed_missed;
            if (completed && d.completion < first_miss)
                ++before;
        }
        q.pct_before_first_miss =
            q.dags_total == 0 ? 100.0
                              : 100.0 * static_cast<double>(before) / static_cast<double>(q.dags_total);
    }

    double util_sum = 0.0;
    for (const PeLedger &p : r.pes) {
        q.dynamic_energy += p.dynamic_energy;
        q.static_energy += p.static_energy;
        double u = r.horizon.ns > 0
                       ? static_cast<double>(p.busy.ns) / static_cast<double>(r.horizon.ns)
                       : 0.0;
        q.pe_utilization.push_back({p.pe, p.class_name, u});
        util_sum += u;
    }
    q.total_energy = r.total_energy;
    q.avg_utilization = r.pes.empty() ? 0.0 : util_sum / static_cast<double>(r.pes.size());
    return q;
}

/// A run is safe when every critical instance met its deadline.
inline bool run_is_safe(const QomReport &q) { return q.crit_met == q.crit_total; }

struct SpeedProbe {
    Rational multiplier{1};
    bool feasible{false};
    double hit_rate{0.0};
};

struct SafeSpeedOptions {
    Rational lo = Rational::of(1, 4);
    Rational hi = Rational(32);
    Rational tolerance = Rational::of(1, 100); // stop when hi - lo <= tolerance * lo
    std::vector<Rational> lattice;             // optional extra probes for sanity checks
};

struct SafeSpeedResult {
    Rational speed{1};
    bool saturated{false}; // still safe at the upper probe bound
    std::vector<SpeedProbe> probes;
    std::vector<std::string> warnings;
};

/// Maximum vehicle-speed multiplier at which every critical instance still
/// meets its deadline. Arrival gaps shrink by the multiplier; deadlines stay
/// fixed. Assumes safety is monotone in the multiplier and bisects; probes
/// are memoized, and any observed non-monotonicity across the probed points
/// downgrades the answer to the largest safe probe with a warning attached.
inline SafeSpeedResult max_safe_speed(const Workload &workload, const Platform &platform,
                                      const Trace &base, const SchedulerFactory &make_sched,
                                      const SimOptions &sim_options = {},
                                      const SafeSpeedOptions &options = {}) {
    if (!options.lo.is_positive() || !(options.lo < options.hi))
        raise(Errc::config_error, "safe-speed search needs 0 < lo < hi");
    if (!options.tolerance.is_positive())
        raise(Errc::config_error, "safe-speed tolerance must be positive");

    SimOptions probe_options = sim_options;
    probe_options.keep_event_log = false;

    SafeSpeedResult res;
    std::map<Rational, SpeedProbe> memo;
    auto probe = [&](const Rational &m) -> const SpeedProbe & {
        auto it = memo.find(m);
        if (it != memo.end())
            return it->second;
        Trace scaled = scale_trace(base, m);
        SimResult run = hetsched::run(workload, platform, resolve_trace(scaled, workload),
                                      make_sched, probe_options);
        QomReport q = qom_report(run);
        SpeedProbe p{m, run_is_safe(q), q.crit_hit_rate};
        res.probes.push_back(p);
        return memo.emplace(m, p).first->second;
    };

    if (!probe(options.lo).feasible)
        raise(Errc::no_feasible_speed,
              "no safe speed at or above multiplier " + options.lo.to_string());
    if (probe(options.hi).feasible) {
        res.speed = options.hi;
        res.saturated = true;
    } else {
        Rational lo = options.lo;
        Rational hi = options.hi;
        while (options.tolerance * lo < hi - lo) {
            Rational mid = (lo + hi) / Rational(2);
            if (probe(mid).feasible)
                lo = mid;
            else
                hi = mid;
        }
        res.speed = lo;
    }

    for (const Rational &m : options.lattice)
        probe(m);

    // Monotonicity audit over everything probed: a safe probe above an
    // unsafe one contradicts the bisection premise.
    Rational best_feasible = res.speed;
    bool violated = false;
    for (auto lower = memo.begin(); lower != memo.end(); ++lower) {
        if (lower->second.feasible) {
            if (best_feasible < lower->first)
                best_feasible = lower->first;
            continue;
        }
        for (auto upper = std::next(lower); upper != memo.end(); ++upper) {
            if (upper->second.feasible) {
                violated = true;
                res.warnings.push_back("safe at x" + upper->first.to_string() +
                                       " but unsafe at lower x" + lower->first.to_string());
            }
        }
    }
    if (violated) {
        // Fall back to the largest probe whose entire downward prefix is safe.
        Rational safe_prefix = options.lo;
        for (const auto &kv : memo) {
            if (!kv.second.feasible)
                break;
            safe_prefix = kv.first;
        }
        res.speed = safe_prefix;
        res.warnings.push_back("speed reduced to x" + safe_prefix.to_string() +
                               " (largest probe below every unsafe point)");
    }
    return res;
}

/// One point in the accelerator-count design space.
struct DsePoint {
    std::int32_t n_det{0};
    std::int32_t n_tra{0};
    std::int32_t n_loc{0};
    std::int32_t n_gpu{0};
    std::int32_t n_cpu{0};

    std::int32_t total() const { return n_det + n_tra + n_loc + n_gpu + n_cpu; }
    bool operator==(const DsePoint &o) const {
        return n_det == o.n_det && n_tra == o.n_tra && n_loc == o.n_loc && n_gpu == o.n_gpu &&
               n_cpu == o.n_cpu;
    }
    /// Lexicographic on (det, tra, loc, gpu, cpu); used only for tie-breaks.
    bool operator<(const DsePoint &o) const {
        if (n_det != o.n_det)
            return n_det < o.n_det;
        if (n_tra != o.n_tra)
            return n_tra < o.n_tra;
        if (n_loc != o.n_loc)
            return n_loc < o.n_loc;
        if (n_gpu != o.n_gpu)
            return n_gpu < o.n_gpu;
        return n_cpu < o.n_cpu;
    }
    std::string to_string() const {
        return "(" + std::to_string(n_det) + "," + std::to_string(n_tra) + "," +
               std::to_string(n_loc) + "," + std::to_string(n_gpu) + "," + std::to_string(n_cpu) +
               ")";
    }
};

/// Candidate counts per dimension; the search space is their product.
struct DseAxes {
    std::vector<std::int32_t> det;
    std::vector<std::int32_t> tra;
    std::vector<std::int32_t> loc;
    std::vector<std::int32_t> gpu;
    std::vector<std::int32_t> cpu;
};

struct DseEvaluation {
    DsePoint point;
    bool covered{false};  // every referenced task kind has an eligible PE class
    bool feasible{false}; // covered and every critical instance met its deadline
    double hit_rate{0.0};
    double energy_mj{0.0};
    double mission_ms{0.0};
    double objective{0.0}; // energy_mj * mission_ms
    std::int32_t pe_count{0};
};

struct DseResult {
    DsePoint best;
    double best_objective{0.0};
    QomReport best_report;
    std::vector<DseEvaluation> evaluations; // grid order
    std::vector<DseEvaluation> frontier;    // Pareto-optimal feasible points
    std::int64_t evaluated{0};
    std::int64_t feasible_count{0};
};

using PlatformBuilder = std::function<Platform(const DsePoint &)>;

/// Names the PE classes that each grid dimension scales.
struct DseClassMap {
    std::string det{"accel-det"};
    std::string tra{"accel-tra"};
    std::string loc{"accel-loc"};
    std::string gpu{"gpu"};
    std::string cpu{"cpu"};
};

/// Builder that stamps grid counts onto a prototype platform. Classes
/// counted zero are removed entirely, so kinds that only run there lose
/// coverage instead of idling forever on a ghost class.
inline PlatformBuilder grid_platform_builder(const Platform &proto, DseClassMap map = {}) {
    return [proto, map](const DsePoint &pt) {
        Platform p = proto;
        p.name = proto.name + pt.to_string();
        for (auto it = p.classes.begin(); it != p.classes.end();) {
            std::int32_t count = it->count;
            if (it->name == map.det)
                count = pt.n_det;
            else if (it->name == map.tra)
                count = pt.n_tra;
            else if (it->name == map.loc)
                count = pt.n_loc;
            else if (it->name == map.gpu)
                count = pt.n_gpu;
            else if (it->name == map.cpu)
                count = pt.n_cpu;
            if (count == 0) {
                it = p.classes.erase(it);
            } else {
                it->count = count;
                ++it;
            }
        }
        p.finalize();
        return p;
    };
}

namespace detail {

inline std::set<KindId> used_kinds(const Workload &w) {
    std::set<KindId> used;
    for (std::size_t t = 0; t < w.template_count(); ++t)
        for (KindId k : w.structure(static_cast<TemplateId>(t)).kinds)
            used.insert(k);
    return used;
}

inline bool covers_used(const EligibilityTable &elig, const std::set<KindId> &used) {
    for (KindId k : used)
        if (elig.eligible(k).empty())
            return false;
    return true;
}

} // namespace detail

/// Exhaustive sweep of the configuration grid. Feasibility needs kind
/// coverage plus a fully safe run; the objective is the energy-delay style
/// product of total energy and mission time. Ties prefer fewer PEs, then
/// the lexicographically smallest point. `jobs` > 1 evaluates grid points
/// on a worker pool.
inline DseResult dse_search(const Workload &workload, const Trace &trace, const DseAxes &axes,
                            const PlatformBuilder &build, const SchedulerFactory &make_sched,
                            const SimOptions &sim_options = {}, int jobs = 1) {
    if (axes.det.empty() || axes.tra.empty() || axes.loc.empty() || axes.gpu.empty() ||
        axes.cpu.empty())
        raise(Errc::empty_space, "a design-space dimension has no candidate counts");

    std::vector<DsePoint> grid;
    for (std::int32_t a : axes.det)
        for (std::int32_t b : axes.tra)
            for (std::int32_t c : axes.loc)
                for (std::int32_t g : axes.gpu)
                    for (std::int32_t n : axes.cpu)
                        grid.push_back({a, b, c, g, n});

    SimOptions probe_options = sim_options;
    probe_options.keep_event_log = false;
    const std::set<KindId> used = detail::used_kinds(workload);

    DseResult res;
    res.evaluations.resize(grid.size());
    std::vector<QomReport> reports(grid.size());

    auto evaluate = [&](std::size_t i) {
        DseEvaluation ev;
        ev.point = grid[i];
        ev.pe_count = grid[i].total();
        if (ev.pe_count > 0) {
            Platform platform = build(grid[i]);
            EligibilityTable elig(platform, workload.kinds);
            ev.covered = detail::covers_used(elig, used);
            if (ev.covered) {
                SimResult run = hetsched::run(workload, platform, resolve_trace(trace, workload),
                                              make_sched, probe_options);
                QomReport q = qom_report(run);
                ev.hit_rate = q.crit_hit_rate;
                ev.energy_mj = q.total_energy.to_mj();
                ev.mission_ms = static_cast<double>(q.mission_time.ns) / 1e6;
                ev.objective = ev.energy_mj * ev.mission_ms;
                ev.feasible = run_is_safe(q);
                reports[i] = std::move(q);
            }
        }
        res.evaluations[i] = std::move(ev);
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i)
            evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1))
                evaluate(i);
        };
        std::vector<std::thread> pool;
        const int n_workers = std::min<int>(jobs, static_cast<int>(grid.size()));
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t)
            pool.emplace_back(worker);
        for (std::thread &t : pool)
            t.join();
    }

    res.evaluated = static_cast<std::int64_t>(grid.size());
    std::size_t best_idx = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const DseEvaluation &ev = res.evaluations[i];
        if (!ev.feasible)
            continue;
        ++res.feasible_count;
        if (best_idx == grid.size()) {
            best_idx = i;
            continue;
        }
        const DseEvaluation &cur = res.evaluations[best_idx];
        if (ev.objective != cur.objective) {
            if (ev.objective < cur.objective)
                best_idx = i;
        } else if (ev.pe_count != cur.pe_count) {
            if (ev.pe_count < cur.pe_count)
                best_idx = i;
        } else if (ev.point < cur.point) {
            best_idx = i;
        }
    }
    if (best_idx == grid.size())
        raise(Errc::no_safe_config, "no grid point is safe for this workload");
    res.best = res.evaluations[best_idx].point;
    res.best_objective = res.evaluations[best_idx].objective;
    res.best_report = std::move(reports[best_idx]);

    for (const DseEvaluation &a : res.evaluations) {
        if (!a.feasible)
            continue;
        bool dominated = false;
        for (const DseEvaluation &b : res.evaluations) {
            if (!b.feasible || &a == &b)
                continue;
            const bool no_worse = b.energy_mj <= a.energy_mj && b.mission_ms <= a.mission_ms &&
                                  b.pe_count <= a.pe_count;
            const bool better = b.energy_mj < a.energy_mj || b.mission_ms < a.mission_ms ||
                                b.pe_count < a.pe_count;
            if (no_worse && better) {
                dominated = true;
                break;
            }
        }
        if (!dominated)
            res.frontier.push_back(a);
    }
    return res;
}

} // namespace hetsched
