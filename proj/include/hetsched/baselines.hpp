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
#include <unordered_set>
#include <vector>

#include "hetsched/scheduler.hpp"

namespace hetsched {

/// Reconstructions of the reference schedulers behind the common
/// interface. They share the dependency tracking in RuntimeState and all
/// dispatching goes through PlatformAccounting, so accounting is identical
/// to the main scheduler's. None of them prunes or promotes.
namespace detail {

/// Queue bookkeeping shared by the baselines: append on ready, drop
/// non-ready entries, erase dispatched ones.
class BaselineQueue {
  public:
    void push(const std::vector<TaskId> &tasks) {
        queue_.insert(queue_.end(), tasks.begin(), tasks.end());
    }

    template <typename Less> void sort(RuntimeState &rt, Less &&less) {
        queue_.erase(std::remove_if(queue_.begin(), queue_.end(),
                                    [&rt](TaskId t) {
                                        return rt.task(t).state != TaskState::ready;
                                    }),
                     queue_.end());
        std::sort(queue_.begin(), queue_.end(), less);
    }

    void erase(const std::vector<TaskId> &dispatched) {
        if (dispatched.empty())
            return;
        std::unordered_set<TaskId> gone(dispatched.begin(), dispatched.end());
        queue_.erase(std::remove_if(queue_.begin(), queue_.end(),
                                    [&gone](TaskId t) { return gone.count(t) != 0; }),
                     queue_.end());
    }

    std::vector<TaskId> &items() { return queue_; }
    const std::vector<TaskId> &items() const { return queue_; }

  private:
    std::vector<TaskId> queue_;
};

/// DVFS slack for schedulers without sub-deadlines: time to the DAG
/// deadline beyond the estimated finish.
inline Duration deadline_slack(const RuntimeState &rt, const TaskInstance &t, TimeStamp est_finish) {
    return rt.dag(t.dag).absolute_deadline() - est_finish;
}

} // namespace detail

/// Two-level EDF: ready tasks ordered by absolute DAG deadline, each bound
/// to its earliest-estimated-finish PE; criticality-blind.
class EdfScheduler : public SchedulerBase {
  public:
    explicit EdfScheduler(RuntimeState &rt) : rt_(&rt) {}

    std::string name() const override { return "2lvl-edf"; }

    void on_ready(const std::vector<TaskId> &tasks, TimeStamp) override { queue_.push(tasks); }

    void assignment_pass(PassContext &ctx) override {
        queue_.sort(*rt_, [this](TaskId a, TaskId b) {
            const TaskInstance &ta = rt_->task(a);
            const TaskInstance &tb = rt_->task(b);
            const TimeStamp da = rt_->dag(ta.dag).absolute_deadline();
            const TimeStamp db = rt_->dag(tb.dag).absolute_deadline();
            if (da != db)
                return da < db;
            if (rt_->dag(ta.dag).arrival != rt_->dag(tb.dag).arrival)
                return rt_->dag(ta.dag).arrival < rt_->dag(tb.dag).arrival;
            return a < b;
        });
        std::vector<TaskId> dispatched;
        for (TaskId tid : queue_.items()) {
            const TaskInstance &t = rt_->task(tid);
            auto best = ctx.best_pe(t);
            if (!best)
                continue;
            if (best->start == ctx.now()) {
                ctx.dispatch(tid, best->pe, detail::deadline_slack(*rt_, t, best->finish));
                dispatched.push_back(tid);
            } else {
                ctx.reserve(best->pe, best->finish);
            }
        }
        queue_.erase(dispatched);
    }

  private:
    RuntimeState *rt_;
    detail::BaselineQueue queue_;
};

struct AdsConfig {
    bool use_mean_cost{true}; // upward rank on mean cost; false uses worst case
};

/// ADS-style: static HEFT upward-rank order (mean execution cost across
/// classes, precomputed per template), with tasks of critical DAGs promoted
/// to the queue front and steered to their kind's fastest eligible class;
/// earliest finish time otherwise.
class AdsScheduler : public SchedulerBase {
  public:
    AdsScheduler(RuntimeState &rt, PlatformAccounting &acct, AdsConfig cfg = {})
        : rt_(&rt), acct_(&acct), cfg_(cfg) {}

    std::string name() const override { return "ads"; }

    void on_ready(const std::vector<TaskId> &tasks, TimeStamp) override { queue_.push(tasks); }

    void assignment_pass(PassContext &ctx) override {
        queue_.sort(*rt_, [this](TaskId a, TaskId b) {
            const TaskInstance &ta = rt_->task(a);
            const TaskInstance &tb = rt_->task(b);
            const int ca = criticality_level(rt_->dag(ta.dag).criticality);
            const int cb = criticality_level(rt_->dag(tb.dag).criticality);
            if (ca != cb)
                return ca > cb;
            const Rational ra = upward_rank(ta);
            const Rational rb = upward_rank(tb);
            if (ra != rb)
                return ra > rb;
            if (rt_->dag(ta.dag).arrival != rt_->dag(tb.dag).arrival)
                return rt_->dag(ta.dag).arrival < rt_->dag(tb.dag).arrival;
            return a < b;
        });
        std::vector<TaskId> dispatched;
        for (TaskId tid : queue_.items()) {
            const TaskInstance &t = rt_->task(tid);
            const bool steer = rt_->dag(t.dag).is_critical();
            const auto &classes = acct_->eligibility().eligible(t.kind);
            if (classes.empty())
                raise(Errc::no_eligible_pe, "kind has no eligible PE class");
            const PeClassId fastest = classes.front().class_id;
            auto best = ctx.best_pe(t, [&](PeClassId c) { return !steer || c == fastest; });
            if (!best)
                continue;
            if (best->start == ctx.now()) {
                ctx.dispatch(tid, best->pe, detail::deadline_slack(*rt_, t, best->finish));
                dispatched.push_back(tid);
            } else {
                ctx.reserve(best->pe, best->finish);
            }
        }
        queue_.erase(dispatched);
    }

  private:
    Rational upward_rank(const TaskInstance &t) const {
        const DagAnalysis &a = rt_->analysis_of(rt_->dag(t.dag));
        const auto n = static_cast<std::size_t>(t.node);
        return cfg_.use_mean_cost ? a.mean_upward_rank[n] : Rational(a.wcet_bottom_level[n].ns);
    }

    RuntimeState *rt_;
    PlatformAccounting *acct_;
    AdsConfig cfg_;
    detail::BaselineQueue queue_;
};

struct CpathConfig {
    bool work_steal{true};
};

/// Critical-path-style list scheduler: priority is the WCET bottom level
/// (longest worst-case chain from the task to a sink). The top half of the
/// queue targets the kind's fastest class, the bottom half the remaining
/// classes; work stealing then lets any still-idle PE take the best waiting
/// task it can run.
class CpathScheduler : public SchedulerBase {
  public:
    CpathScheduler(RuntimeState &rt, PlatformAccounting &acct, CpathConfig cfg = {})
        : rt_(&rt), acct_(&acct), cfg_(cfg) {}

    std::string name() const override { return "cpath"; }

    void on_ready(const std::vector<TaskId> &tasks, TimeStamp) override { queue_.push(tasks); }

    void assignment_pass(PassContext &ctx) override {
        queue_.sort(*rt_, [this](TaskId a, TaskId b) {
            const TaskInstance &ta = rt_->task(a);
            const TaskInstance &tb = rt_->task(b);
            const Duration la = bottom_level(ta);
            const Duration lb = bottom_level(tb);
            if (la != lb)
                return la > lb;
            if (rt_->dag(ta.dag).arrival != rt_->dag(tb.dag).arrival)
                return rt_->dag(ta.dag).arrival < rt_->dag(tb.dag).arrival;
            return a < b;
        });

        std::vector<TaskId> dispatched;
        const std::size_t n = queue_.items().size();
        const std::size_t high_count = (n + 1) / 2;
        for (std::size_t i = 0; i < n; ++i) {
            const TaskId tid = queue_.items()[i];
            const TaskInstance &t = rt_->task(tid);
            const auto &classes = acct_->eligibility().eligible(t.kind);
            if (classes.empty())
                raise(Errc::no_eligible_pe, "kind has no eligible PE class");
            const PeClassId fastest = classes.front().class_id;
            const bool high = i < high_count;
            auto filter = [&](PeClassId c) {
                if (classes.size() < 2)
                    return true; // single-class kinds compete for that class
                return high ? c == fastest : c != fastest;
            };
            auto best = ctx.best_pe(t, filter);
            if (!best)
                continue;
            if (best->start == ctx.now()) {
                ctx.dispatch(tid, best->pe, detail::deadline_slack(*rt_, t, best->finish));
                dispatched.push_back(tid);
            } else {
                ctx.reserve(best->pe, best->finish);
            }
        }
        queue_.erase(dispatched);

        if (cfg_.work_steal)
            steal_pass(ctx);
    }

  private:
    Duration bottom_level(const TaskInstance &t) const {
        const DagAnalysis &a = rt_->analysis_of(rt_->dag(t.dag));
        return a.wcet_bottom_level[static_cast<std::size_t>(t.node)];
    }

    /// Idle, unreserved PEs take the highest-priority waiting task they are
    /// eligible for, in ascending PE id order.
    void steal_pass(PassContext &ctx) {
        for (PeId pe = 0; pe < acct_->platform().total_pes(); ++pe) {
            if (!ctx.idle_now(pe))
                continue;
            const PeClassId cls = acct_->platform().class_of(pe);
            for (TaskId tid : queue_.items()) {
                const TaskInstance &t = rt_->task(tid);
                if (t.state != TaskState::ready)
                    continue;
                if (acct_->eligibility().entry(t.kind, cls) == nullptr)
                    continue;
                PassContext::Estimate e = ctx.estimate(t, pe);
                ctx.dispatch(tid, pe, detail::deadline_slack(*rt_, t, e.finish));
                queue_.erase({tid});
                break;
            }
        }
    }

    RuntimeState *rt_;
    PlatformAccounting *acct_;
    CpathConfig cfg_;
    detail::BaselineQueue queue_;
};

} // namespace hetsched
