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

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hetsched/analysis.hpp"
#include "hetsched/error.hpp"
#include "hetsched/model.hpp"
#include "hetsched/time.hpp"

namespace hetsched {

/// Immutable per-mission workload description: kinds plus validated and
/// analyzed templates, addressed by dense TemplateId.
class Workload {
  public:
    KindTable kinds;

    TemplateId add_template(const DagTemplate &tmpl, std::size_t max_paths = 10000) {
        if (template_id_.count(tmpl.name))
            raise(Errc::duplicate_node, "template '" + tmpl.name + "' registered twice");
        DagStructure s = validate_dag(tmpl, kinds);
        DagAnalysis a = analyze(s, kinds, max_paths);
        TemplateId id = static_cast<TemplateId>(structures_.size());
        template_id_[tmpl.name] = id;
        structures_.push_back(std::move(s));
        analyses_.push_back(std::move(a));
        return id;
    }

    TemplateId template_id(const std::string &name) const {
        auto it = template_id_.find(name);
        if (it == template_id_.end())
            raise(Errc::parse_error, "unknown DAG template '" + name + "'");
        return it->second;
    }
    bool has_template(const std::string &name) const { return template_id_.count(name) != 0; }

    const DagStructure &structure(TemplateId id) const {
        return structures_.at(static_cast<std::size_t>(id));
    }
    const DagAnalysis &analysis(TemplateId id) const {
        return analyses_.at(static_cast<std::size_t>(id));
    }
    std::size_t template_count() const { return structures_.size(); }

  private:
    std::vector<DagStructure> structures_;
    std::vector<DagAnalysis> analyses_;
    std::unordered_map<std::string, TemplateId> template_id_;
};

enum class TaskState : std::int8_t { blocked, ready, running, done, pruned };
enum class DagState : std::int8_t { active, completed_met, completed_missed, pruned };

inline const char *dag_state_name(DagState s) {
    switch (s) {
    case DagState::active: return "active";
    case DagState::completed_met: return "met";
    case DagState::completed_missed: return "missed";
    case DagState::pruned: return "pruned";
    }
    return "?";
}

/// Runtime task. Scheduler-policy fields (sub-deadline budget, rank
/// snapshot) live here so ranking passes touch one cache line per task.
struct TaskInstance {
    TaskId id{0};
    DagInstanceId dag{0};
    std::int32_t node{0};
    KindId kind{kInvalidKind};
    TaskState state{TaskState::blocked};
    std::int32_t unresolved_parents{0};

    TimeStamp ready_at;
    Rational sd_static;    // ns; attached at admission from the analysis
    Rational remaining_sd; // ns; aged budget under the static policy
    TimeStamp last_aged;

    // Rank snapshot from the most recent ranking pass.
    std::int32_t rank_type{0};
    Rational eff_slack_best; // ns, on the fastest eligible class
    Rational eff_slack_hom;  // ns, at kind WCET

    // Assignment outcome.
    PeId pe{kInvalidPe};
    TimeStamp dispatched_at;
    TimeStamp finish_at;
};

/// Runtime DAG arrival.
struct DagInstance {
    DagInstanceId id{0};
    TemplateId tmpl{0};
    TimeStamp arrival;
    Duration deadline;
    Criticality criticality{Criticality::normal};
    bool promoted{false};
    DagState state{DagState::active};
    std::int32_t tasks_done{0};
    std::int32_t task_count{0};
    TimeStamp completion;
    TaskId first_task{0}; // tasks occupy [first_task, first_task + task_count)

    TimeStamp absolute_deadline() const { return arrival + deadline; }
    bool is_critical() const { return criticality == Criticality::critical; }

    TaskId task_for_node(std::int32_t node) const { return first_task + node; }
};

/// DAG-level transition observed by the mission log.
struct DagTransition {
    enum class Kind : std::int8_t { done, pruned, promoted } kind;
    DagInstanceId dag;
    TimeStamp time;
};

/// Mutable mission state shared by every scheduler: instances, dependency
/// tracking, terminal accounting. Schedulers layer their queue policies on
/// top; none of the bookkeeping here is policy-specific. DAG transitions
/// that happen inside scheduler sweeps (prune, promote, terminal states)
/// are journaled for the engine's event log.
class RuntimeState {
  public:
    explicit RuntimeState(const Workload &workload) : workload_(&workload) {}

    const Workload &workload() const { return *workload_; }

    DagInstance &dag(DagInstanceId id) { return dags_.at(static_cast<std::size_t>(id)); }
    const DagInstance &dag(DagInstanceId id) const { return dags_.at(static_cast<std::size_t>(id)); }
    TaskInstance &task(TaskId id) { return tasks_.at(static_cast<std::size_t>(id)); }
    const TaskInstance &task(TaskId id) const { return tasks_.at(static_cast<std::size_t>(id)); }
    std::size_t dag_count() const { return dags_.size(); }
    std::size_t task_count() const { return tasks_.size(); }
    const std::vector<DagInstance> &dags() const { return dags_; }
    const std::vector<TaskInstance> &tasks() const { return tasks_; }

    const DagStructure &structure_of(const DagInstance &d) const {
        return workload_->structure(d.tmpl);
    }
    const DagAnalysis &analysis_of(const DagInstance &d) const {
        return workload_->analysis(d.tmpl);
    }

    /// Admits one DAG arrival: instantiates its tasks, attaches static
    /// sub-deadlines, marks parentless tasks ready. Returns the new ready
    /// tasks (in node order). Admission never fails; infeasible DAGs are
    /// the pruning layer's concern.
    std::vector<TaskId> admit(TemplateId tmpl, TimeStamp arrival, Duration deadline,
                              Criticality crit) {
        if (deadline.ns <= 0)
            raise(Errc::non_positive_deadline, "DAG admitted with non-positive deadline");
        const DagStructure &s = workload_->structure(tmpl);
        const DagAnalysis &a = workload_->analysis(tmpl);

        DagInstance d;
        d.id = static_cast<DagInstanceId>(dags_.size());
        d.tmpl = tmpl;
        d.arrival = arrival;
        d.deadline = deadline;
        d.criticality = crit;
        d.task_count = static_cast<std::int32_t>(s.size());
        d.first_task = static_cast<TaskId>(tasks_.size());
        if (crit == Criticality::critical)
            ++active_crit2_;

        std::vector<Rational> sd = static_subdeadlines(a, deadline);
        std::vector<TaskId> newly_ready;
        for (std::size_t n = 0; n < s.size(); ++n) {
            TaskInstance t;
            t.id = static_cast<TaskId>(tasks_.size());
            t.dag = d.id;
            t.node = static_cast<std::int32_t>(n);
            t.kind = s.kinds[n];
            t.unresolved_parents = static_cast<std::int32_t>(s.parents[n].size());
            t.sd_static = sd[n];
            t.remaining_sd = sd[n];
            if (t.unresolved_parents == 0) {
                t.state = TaskState::ready;
                t.ready_at = arrival;
                t.last_aged = arrival;
                newly_ready.push_back(t.id);
            }
            tasks_.push_back(t);
        }
        dags_.push_back(d);
        return newly_ready;
    }

    void mark_running(TaskId id, PeId pe, TimeStamp start, TimeStamp finish) {
        TaskInstance &t = task(id);
        if (t.state != TaskState::ready)
            raise(Errc::invalid_state, "dispatching task " + std::to_string(id) + " that is not ready");
        t.state = TaskState::running;
        t.pe = pe;
        t.dispatched_at = start;
        t.finish_at = finish;
    }

    /// Completion: resolves edges to children, returns newly ready tasks
    /// (ascending node order). Sets the DAG terminal state after its last
    /// task and updates the met/missed ledger.
    std::vector<TaskId> on_complete(TaskId id, TimeStamp now) {
        TaskInstance &t = task(id);
        if (t.state != TaskState::running)
            raise(Errc::invalid_state, "completing task " + std::to_string(id) + " that is not running");
        t.state = TaskState::done;
        DagInstance &d = dag(t.dag);
        ++d.tasks_done;

        std::vector<TaskId> newly_ready;
        const DagStructure &s = structure_of(d);
        for (std::int32_t c : s.children[static_cast<std::size_t>(t.node)]) {
            TaskInstance &child = task(d.task_for_node(c));
            if (child.state == TaskState::pruned)
                continue;
            if (--child.unresolved_parents == 0 && child.state == TaskState::blocked) {
                child.state = TaskState::ready;
                child.ready_at = now;
                child.last_aged = now;
                newly_ready.push_back(child.id);
            }
        }

        if (d.tasks_done == d.task_count && d.state == DagState::active) {
            d.completion = now;
            const bool met = now <= d.absolute_deadline();
            d.state = met ? DagState::completed_met : DagState::completed_missed;
            settle_terminal(d, met, now);
            journal_.push_back({DagTransition::Kind::done, d.id, now});
        }
        return newly_ready;
    }

    /// Drops a crit=1 DAG: every not-yet-done task becomes pruned. Running
    /// tasks finish (run-to-completion) but resolve no further children.
    void prune_dag(DagInstanceId id, TimeStamp now) {
        DagInstance &d = dag(id);
        if (d.is_critical())
            raise(Errc::invalid_state, "attempt to prune a critical DAG");
        if (d.state != DagState::active)
            raise(Errc::invalid_state, "attempt to prune a terminal DAG");
        d.state = DagState::pruned;
        d.completion = now;
        ++pruned_dags_;
        for (TaskId t = d.first_task; t < d.first_task + d.task_count; ++t) {
            TaskInstance &ti = task(t);
            if (ti.state == TaskState::blocked || ti.state == TaskState::ready)
                ti.state = TaskState::pruned;
        }
        journal_.push_back({DagTransition::Kind::pruned, d.id, now});
    }

    void promote_dag(DagInstanceId id, TimeStamp now) {
        DagInstance &d = dag(id);
        if (d.is_critical() || d.state != DagState::active)
            raise(Errc::invalid_state, "promotion target must be an active crit=1 DAG");
        d.criticality = Criticality::critical;
        d.promoted = true;
        ++promoted_dags_;
        ++active_crit2_;
        journal_.push_back({DagTransition::Kind::promoted, d.id, now});
    }

    /// Hands over the DAG transitions journaled since the last call.
    std::vector<DagTransition> take_journal() {
        std::vector<DagTransition> out;
        out.swap(journal_);
        return out;
    }

    bool critical_present() const { return active_crit2_ > 0; }
    std::int64_t pruned_dags() const { return pruned_dags_; }
    std::int64_t promoted_dags() const { return promoted_dags_; }

    /// Time of the most recent crit=1 DAG completing within its deadline;
    /// the promotion window's anchor. Unset until the first such event.
    bool crit1_met_since(TimeStamp cutoff) const {
        return has_crit1_met_ && last_crit1_met_ >= cutoff;
    }

    bool current_criticality_is_2(const TaskInstance &t) const { return dag(t.dag).is_critical(); }

  private:
    void settle_terminal(DagInstance &d, bool met, TimeStamp now) {
        if (d.is_critical()) {
            --active_crit2_;
        } else if (met) {
            has_crit1_met_ = true;
            last_crit1_met_ = now;
        }
    }

    const Workload *workload_;
    std::vector<DagInstance> dags_;
    std::vector<TaskInstance> tasks_;
    std::int64_t active_crit2_{0};
    std::int64_t pruned_dags_{0};
    std::int64_t promoted_dags_{0};
    bool has_crit1_met_{false};
    TimeStamp last_crit1_met_;
    std::vector<DagTransition> journal_;
};

} // namespace hetsched
