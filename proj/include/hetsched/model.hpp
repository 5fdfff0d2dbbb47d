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
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "hetsched/error.hpp"
#include "hetsched/time.hpp"

namespace hetsched {

using KindId = std::int32_t;
using NodeId = std::int64_t;
using TemplateId = std::int32_t;
using DagInstanceId = std::int64_t;
using TaskId = std::int64_t;
using PeId = std::int32_t;
using PeClassId = std::int32_t;

constexpr KindId kInvalidKind = -1;
constexpr PeId kInvalidPe = -1;

/// Execution profile of one task kind on one PE class: how long a single
/// instance runs at nominal frequency and the dynamic power it draws there.
struct KindProfileEntry {
    std::string pe_class;
    Duration exec;
    std::int64_t power_mw{0};
};

/// A task kind (kernel) with its per-class execution profile and the data
/// footprint used by the transfer model. A kind is eligible on exactly the
/// classes listed in `profile`.
struct TaskKind {
    std::string name;
    std::vector<KindProfileEntry> profile;
    std::int64_t input_bytes{1 << 20};
    std::int64_t output_bytes{1 << 20};

    const KindProfileEntry *entry_for(const std::string &pe_class) const {
        for (const auto &e : profile)
            if (e.pe_class == pe_class)
                return &e;
        return nullptr;
    }

    /// Worst-case execution time: slowest eligible class at nominal frequency.
    Duration wcet() const {
        check_nonempty();
        Duration w = profile.front().exec;
        for (const auto &e : profile)
            w = max(w, e.exec);
        return w;
    }

    /// Best-case execution time: fastest eligible class at nominal frequency.
    Duration bcet() const {
        check_nonempty();
        Duration b = profile.front().exec;
        for (const auto &e : profile)
            b = min(b, e.exec);
        return b;
    }

    /// Mean execution time across eligible classes, exact.
    Rational acet() const {
        check_nonempty();
        Rational sum = 0;
        for (const auto &e : profile)
            sum += Rational(e.exec.ns);
        return sum / Rational(static_cast<std::int64_t>(profile.size()));
    }

  private:
    void check_nonempty() const {
        if (profile.empty())
            raise(Errc::unknown_task_kind, "kind '" + name + "' has an empty execution profile");
    }
};

/// Registry of task kinds, indexed both by dense id and by name.
class KindTable {
  public:
    KindId add(TaskKind kind) {
        if (by_name_.count(kind.name) != 0)
            raise(Errc::duplicate_node, "task kind '" + kind.name + "' registered twice");
        KindId id = static_cast<KindId>(kinds_.size());
        by_name_[kind.name] = id;
        kinds_.push_back(std::move(kind));
        return id;
    }

    KindId id_of(const std::string &name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end())
            raise(Errc::unknown_task_kind, "no task kind named '" + name + "'");
        return it->second;
    }

    bool contains(const std::string &name) const { return by_name_.count(name) != 0; }
    const TaskKind &at(KindId id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= kinds_.size())
            raise(Errc::unknown_task_kind, "kind id out of range");
        return kinds_[static_cast<std::size_t>(id)];
    }
    std::size_t size() const { return kinds_.size(); }
    const std::vector<TaskKind> &all() const { return kinds_; }

  private:
    std::vector<TaskKind> kinds_;
    std::unordered_map<std::string, KindId> by_name_;
};

/// One node of a DAG template.
struct TemplateNode {
    NodeId id{0};
    KindId kind{kInvalidKind};
};

/// Application DAG shape shared by every instance released from it.
/// Node ids are caller-chosen and need not be contiguous; edges reference
/// node ids. Payload overrides replace the destination kind's input size
/// on that edge for the transfer model.
struct DagTemplate {
    std::string name;
    std::vector<TemplateNode> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::map<std::pair<NodeId, NodeId>, std::int64_t> payload_bytes;
};

/// Validated adjacency view of a template: dense node indexing, parent and
/// child lists, one fixed topological order. Produced by validate_dag and
/// immutable afterwards; instances and analyses index nodes by position in
/// `node_ids`.
struct DagStructure {
    std::string name;
    std::vector<NodeId> node_ids;
    std::vector<KindId> kinds;
    std::vector<std::vector<std::int32_t>> parents;
    std::vector<std::vector<std::int32_t>> children;
    std::vector<std::int32_t> topo_order;
    std::vector<std::int32_t> sources;
    std::vector<std::int32_t> sinks;
    std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> payload_bytes;

    std::size_t size() const { return node_ids.size(); }

    std::int32_t index_of(NodeId id) const {
        for (std::size_t i = 0; i < node_ids.size(); ++i)
            if (node_ids[i] == id)
                return static_cast<std::int32_t>(i);
        raise(Errc::dangling_edge, "node id not in template");
    }
};

/// Checks a template for duplicate nodes, dangling edges and cycles, and
/// builds its adjacency view. Node order in the result follows the template;
/// the topological order is Kahn's algorithm with a smallest-index-first
/// tie-break, so it is deterministic for a given template.
inline DagStructure validate_dag(const DagTemplate &tmpl, const KindTable &kinds) {
    DagStructure s;
    s.name = tmpl.name;
    if (tmpl.nodes.empty())
        raise(Errc::invalid_state, "template '" + tmpl.name + "' has no nodes");

    std::unordered_map<NodeId, std::int32_t> index;
    for (const auto &node : tmpl.nodes) {
        if (index.count(node.id) != 0)
            raise(Errc::duplicate_node,
                  "template '" + tmpl.name + "' repeats node " + std::to_string(node.id));
        if (node.kind < 0 || static_cast<std::size_t>(node.kind) >= kinds.size())
            raise(Errc::unknown_task_kind,
                  "template '" + tmpl.name + "' node " + std::to_string(node.id) + " has an unknown kind");
        index[node.id] = static_cast<std::int32_t>(s.node_ids.size());
        s.node_ids.push_back(node.id);
        s.kinds.push_back(node.kind);
    }

    const std::size_t n = s.node_ids.size();
    s.parents.resize(n);
    s.children.resize(n);
    for (const auto &[from, to] : tmpl.edges) {
        auto fi = index.find(from);
        auto ti = index.find(to);
        if (fi == index.end() || ti == index.end())
            raise(Errc::dangling_edge, "template '" + tmpl.name + "' edge " + std::to_string(from) +
                                           "->" + std::to_string(to) + " references a missing node");
        if (fi->second == ti->second)
            raise(Errc::cycle_detected, "template '" + tmpl.name + "' has a self-loop on node " +
                                            std::to_string(from));
        s.children[static_cast<std::size_t>(fi->second)].push_back(ti->second);
        s.parents[static_cast<std::size_t>(ti->second)].push_back(fi->second);
    }
    for (auto &v : s.parents)
        std::sort(v.begin(), v.end());
    for (auto &v : s.children)
        std::sort(v.begin(), v.end());

    for (const auto &[edge, bytes] : tmpl.payload_bytes) {
        auto fi = index.find(edge.first);
        auto ti = index.find(edge.second);
        if (fi == index.end() || ti == index.end())
            raise(Errc::dangling_edge, "payload override on missing edge in '" + tmpl.name + "'");
        s.payload_bytes[{fi->second, ti->second}] = bytes;
    }

    // Kahn's algorithm; smallest index first keeps the order reproducible.
    std::vector<std::int32_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        indegree[i] = static_cast<std::int32_t>(s.parents[i].size());
    std::vector<std::int32_t> frontier;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0)
            frontier.push_back(static_cast<std::int32_t>(i));
    s.sources = frontier;
    while (!frontier.empty()) {
        auto it = std::min_element(frontier.begin(), frontier.end());
        std::int32_t u = *it;
        frontier.erase(it);
        s.topo_order.push_back(u);
        for (std::int32_t c : s.children[static_cast<std::size_t>(u)]) {
            if (--indegree[static_cast<std::size_t>(c)] == 0)
                frontier.push_back(c);
        }
    }
    if (s.topo_order.size() != n)
        raise(Errc::cycle_detected, "template '" + tmpl.name + "' contains a cycle");

    for (std::size_t i = 0; i < n; ++i)
        if (s.children[i].empty())
            s.sinks.push_back(static_cast<std::int32_t>(i));
    return s;
}

/// Mission criticality of a DAG instance. Level 2 aborts the mission when
/// missed; level 1 may be dropped under pressure.
enum class Criticality : std::int8_t { normal = 1, critical = 2 };

inline int criticality_level(Criticality c) { return static_cast<int>(c); }

} // namespace hetsched
