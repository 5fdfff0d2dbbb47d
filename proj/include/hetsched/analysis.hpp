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

#include <cstddef>
#include <vector>

#include "hetsched/model.hpp"
#include "hetsched/rational.hpp"
#include "hetsched/time.hpp"

namespace hetsched {

/// One source-to-sink path of a template, with the worst-case totals the
/// sub-deadline decomposition needs. `cp_segment_wcet` sums the WCETs of the
/// path's nodes that also lie on the critical path.
struct DagPath {
    std::vector<std::int32_t> nodes;
    Duration total_wcet;
    Duration cp_segment_wcet;
    Duration noncp_segment_wcet;
    bool intersects_critical{false};
    /// remaining_wcet[i]: WCET of nodes[i..end], i.e. what is still ahead on
    /// this path once nodes[i] becomes the next task to run.
    std::vector<Duration> remaining_wcet;
};

/// Per-template timing analysis. Computed once per template and shared by
/// every instance; all per-node vectors are indexed like DagStructure nodes.
///
/// `subdeadline_ratio` is the deadline-independent coefficient of the static
/// decomposition: a node's sub-deadline under DAG deadline D is ratio * D.
/// Critical-path nodes use WCET/CPT; a node off the critical path takes the
/// smallest value over its paths, where a path disjoint from the critical
/// path contributes WCET/PT and an intersecting path contributes its
/// non-critical segment share WCET * (CPT - CPST) / (NCPST * CPT).
///
/// `slack_ratio` drives the dynamic policy: WCET divided by the largest
/// remaining-WCET over the node's paths, so the node's sub-deadline under
/// remaining DAG slack S is slack_ratio * S.
struct DagAnalysis {
    std::string name;
    std::vector<DagPath> paths;
    std::size_t critical_path_index{0};
    Duration critical_path_wcet;
    std::int32_t critical_path_length{0};

    std::vector<char> on_critical_path;
    std::vector<Duration> wcet;
    std::vector<Duration> bcet;
    std::vector<Rational> subdeadline_ratio;
    std::vector<Rational> slack_ratio;
    std::vector<Duration> max_remaining_wcet;

    /// Longest-to-sink levels reused by the runtime layers: `wcet_bottom_level`
    /// includes the node itself; `bcet_after` excludes it (0 at sinks).
    std::vector<Duration> wcet_bottom_level;
    std::vector<Duration> bcet_bottom_level;
    std::vector<Duration> bcet_after;

    /// Upward rank on mean execution cost (includes the node itself).
    std::vector<Rational> mean_upward_rank;
};

namespace detail {

inline void enumerate_paths(const DagStructure &dag, const std::vector<Duration> &wcet,
                            std::size_t max_paths, std::vector<DagPath> &out) {
    std::vector<std::int32_t> stack;
    // Iterative DFS over (node, next-child) frames; sources and child lists
    // are sorted, so paths come out in a fixed lexicographic order.
    struct Frame {
        std::int32_t node;
        std::size_t next_child;
    };
    for (std::int32_t src : dag.sources) {
        std::vector<Frame> frames{{src, 0}};
        stack.clear();
        stack.push_back(src);
        while (!frames.empty()) {
            Frame &f = frames.back();
            const auto &kids = dag.children[static_cast<std::size_t>(f.node)];
            if (kids.empty() && f.next_child == 0) {
                DagPath p;
                p.nodes = stack;
                Duration sum = Duration::zero();
                for (std::int32_t n : stack)
                    sum += wcet[static_cast<std::size_t>(n)];
                p.total_wcet = sum;
                out.push_back(std::move(p));
                if (out.size() > max_paths)
                    raise(Errc::path_explosion, "template '" + dag.name + "' exceeds " +
                                                    std::to_string(max_paths) + " source-sink paths");
                f.next_child = 1;
                continue;
            }
            if (f.next_child < kids.size()) {
                std::int32_t c = kids[f.next_child++];
                frames.push_back({c, 0});
                stack.push_back(c);
            } else {
                frames.pop_back();
                stack.pop_back();
            }
        }
    }
}

} // namespace detail

/// Analyzes a validated template: enumerates every source-to-sink path
/// (bounded by `max_paths`), picks the critical path (largest WCET sum,
/// lexicographically smallest node sequence on ties) and derives the static
/// and dynamic sub-deadline coefficients plus the bottom levels.
inline DagAnalysis analyze(const DagStructure &dag, const KindTable &kinds,
                           std::size_t max_paths = 10000) {
    const std::size_t n = dag.size();
    DagAnalysis a;
    a.name = dag.name;
    a.wcet.resize(n);
    a.bcet.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TaskKind &kind = kinds.at(dag.kinds[i]);
        a.wcet[i] = kind.wcet();
        a.bcet[i] = kind.bcet();
        // Segment sums divide the decomposition below; a zero WCET would
        // poison those divisors.
        if (a.wcet[i].ns <= 0)
            raise(Errc::invalid_state,
                  "kind '" + kind.name + "' has non-positive worst-case time");
    }

    detail::enumerate_paths(dag, a.wcet, max_paths, a.paths);

    a.critical_path_index = 0;
    for (std::size_t p = 1; p < a.paths.size(); ++p) {
        if (a.paths[p].total_wcet > a.paths[a.critical_path_index].total_wcet)
            a.critical_path_index = p;
    }
    const DagPath &cp = a.paths[a.critical_path_index];
    a.critical_path_wcet = cp.total_wcet;
    a.critical_path_length = static_cast<std::int32_t>(cp.nodes.size());

    a.on_critical_path.assign(n, 0);
    for (std::int32_t node : cp.nodes)
        a.on_critical_path[static_cast<std::size_t>(node)] = 1;

    for (auto &p : a.paths) {
        Duration seg = Duration::zero();
        for (std::int32_t node : p.nodes)
            if (a.on_critical_path[static_cast<std::size_t>(node)])
                seg += a.wcet[static_cast<std::size_t>(node)];
        p.cp_segment_wcet = seg;
        p.noncp_segment_wcet = p.total_wcet - seg;
        p.intersects_critical = seg.ns > 0;
        p.remaining_wcet.assign(p.nodes.size(), Duration::zero());
        Duration suffix = Duration::zero();
        for (std::size_t i = p.nodes.size(); i-- > 0;) {
            suffix += a.wcet[static_cast<std::size_t>(p.nodes[i])];
            p.remaining_wcet[i] = suffix;
        }
    }

    const Rational cpt(a.critical_path_wcet.ns);
    a.subdeadline_ratio.assign(n, Rational(0));
    a.max_remaining_wcet.assign(n, Duration::zero());
    std::vector<char> seen(n, 0);
    for (const auto &p : a.paths) {
        for (std::size_t i = 0; i < p.nodes.size(); ++i) {
            const auto node = static_cast<std::size_t>(p.nodes[i]);
            const Rational w(a.wcet[node].ns);
            Rational candidate;
            if (a.on_critical_path[node]) {
                candidate = w / cpt;
            } else if (!p.intersects_critical) {
                candidate = w / Rational(p.total_wcet.ns);
            } else {
                // Non-critical segment: its share of the deadline is
                // (CPT - CPST) / CPT, split across the segment by WCET.
                candidate = w * Rational(a.critical_path_wcet.ns - p.cp_segment_wcet.ns) /
                            (Rational(p.noncp_segment_wcet.ns) * cpt);
            }
            if (!seen[node] || candidate < a.subdeadline_ratio[node])
                a.subdeadline_ratio[node] = candidate;
            seen[node] = 1;
            a.max_remaining_wcet[node] = max(a.max_remaining_wcet[node], p.remaining_wcet[i]);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!seen[i])
            raise(Errc::invalid_state, "node unreachable from every source in '" + dag.name + "'");

    a.slack_ratio.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        a.slack_ratio[i] = Rational(a.wcet[i].ns) / Rational(a.max_remaining_wcet[i].ns);

    a.wcet_bottom_level.assign(n, Duration::zero());
    a.bcet_bottom_level.assign(n, Duration::zero());
    a.bcet_after.assign(n, Duration::zero());
    a.mean_upward_rank.assign(n, Rational(0));
    for (std::size_t t = dag.topo_order.size(); t-- > 0;) {
        const auto node = static_cast<std::size_t>(dag.topo_order[t]);
        Duration best_w = Duration::zero();
        Duration best_b = Duration::zero();
        Rational best_m(0);
        for (std::int32_t c : dag.children[node]) {
            best_w = max(best_w, a.wcet_bottom_level[static_cast<std::size_t>(c)]);
            best_b = max(best_b, a.bcet_bottom_level[static_cast<std::size_t>(c)]);
            if (a.mean_upward_rank[static_cast<std::size_t>(c)] > best_m)
                best_m = a.mean_upward_rank[static_cast<std::size_t>(c)];
        }
        a.wcet_bottom_level[node] = a.wcet[node] + best_w;
        a.bcet_bottom_level[node] = a.bcet[node] + best_b;
        a.bcet_after[node] = best_b;
        a.mean_upward_rank[node] = kinds.at(dag.kinds[node]).acet() + best_m;
    }

    return a;
}

/// Static sub-deadlines for a concrete DAG deadline, exact. The values of
/// the critical path sum to the deadline by construction.
inline std::vector<Rational> static_subdeadlines(const DagAnalysis &a, Duration deadline) {
    if (deadline.ns <= 0)
        raise(Errc::non_positive_deadline,
              "deadline must be positive, got " + std::to_string(deadline.ns) + " ns");
    std::vector<Rational> sd(a.subdeadline_ratio.size());
    const Rational d(deadline.ns);
    for (std::size_t i = 0; i < sd.size(); ++i)
        sd[i] = a.subdeadline_ratio[i] * d;
    return sd;
}

/// Dynamic sub-deadline of one node under the DAG's remaining slack. The
/// slack may be zero or negative once the deadline has passed; the
/// sub-deadline then is as well.
inline Rational dynamic_subdeadline(const DagAnalysis &a, std::size_t node, Rational slack_dag) {
    return a.slack_ratio[node] * slack_dag;
}

} // namespace hetsched
