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

#include "hetsched/meta_sched.hpp"
#include "hetsched/scheduler.hpp"

namespace hetsched {

/// The two-level QoM-aware scheduler: MetaSched ranking, pruning and
/// promotion feeding the non-blocking TS assignment pass with lookahead
/// window w and the criticality carve-out.
class HetSchedScheduler : public SchedulerBase {
  public:
    HetSchedScheduler(RuntimeState &rt, PlatformAccounting &acct, HetSchedConfig cfg)
        : rt_(&rt), acct_(&acct), meta_(rt, acct.eligibility(), cfg), cfg_(cfg) {}

    std::string name() const override {
        return std::string("hetsched-") +
               (cfg_.policy == Policy::ms_stat ? "msstat" : "msdyn") + "-" +
               ranking_name(cfg_.ranking);
    }

    const MetaSched &meta() const { return meta_; }
    const std::vector<TaskId> &ready_queue() const { return queue_; }

    void on_ready(const std::vector<TaskId> &tasks, TimeStamp now) override {
        for (TaskId t : tasks) {
            meta_.refresh_rank(rt_->task(t), now);
            queue_.push_back(t);
        }
    }

    void assignment_pass(PassContext &ctx) override {
        const TimeStamp now = ctx.now();

        // Rank update (if enabled; otherwise admission-time snapshots stand),
        // then promotion, then deadline tracking, then the sorted queue.
        std::vector<TaskId> prune_list;
        if (cfg_.rank_update_enabled) {
            for (TaskId t : queue_) {
                TaskInstance &ti = rt_->task(t);
                if (ti.state != TaskState::ready)
                    continue;
                meta_.refresh_rank(ti, now);
                if (meta_.prune_candidate(ti))
                    prune_list.push_back(t);
            }
        }
        meta_.promote_sweep(now);
        if (cfg_.pruning_enabled)
            meta_.prune_sweep(prune_list, now, rt_->critical_present());
        compact_queue();
        std::sort(queue_.begin(), queue_.end(),
                  [this](TaskId a, TaskId b) { return meta_.higher_priority(a, b); });

        // TS window walk over the first w positions. Each task binds its
        // earliest-finish PE; it dispatches only if that PE can start now,
        // otherwise it holds a reservation and waits. The carve-out steers
        // non-critical tasks onto idle slower classes (deadline permitting)
        // while critical DAGs are in flight.
        const bool carve = cfg_.carveout_enabled && rt_->critical_present();
        const std::size_t limit =
            std::min(queue_.size(), static_cast<std::size_t>(cfg_.window_w));
        std::vector<TaskId> dispatched;
        for (std::size_t i = 0; i < limit; ++i) {
            const TaskId tid = queue_[i];
            const TaskInstance &t = rt_->task(tid);
            if (carve && !rt_->dag(t.dag).is_critical() && try_carveout(ctx, t)) {
                dispatched.push_back(tid);
                continue;
            }
            auto best = ctx.best_pe(t);
            if (!best)
                continue;
            if (best->start == now) {
                ctx.dispatch(tid, best->pe, slack_on(t, best->pe));
                dispatched.push_back(tid);
            } else {
                ctx.reserve(best->pe, best->finish);
            }
        }
        if (!dispatched.empty()) {
            std::unordered_set<TaskId> gone(dispatched.begin(), dispatched.end());
            queue_.erase(std::remove_if(queue_.begin(), queue_.end(),
                                        [&gone](TaskId t) { return gone.count(t) != 0; }),
                         queue_.end());
        }
    }

  private:
    /// Slack handed to DVFS: the task's effective slack on the chosen class.
    Duration slack_on(const TaskInstance &t, PeId pe) const {
        const EligibleClass *e = acct_->eligibility().entry(t.kind, acct_->platform().class_of(pe));
        const Rational s = t.remaining_sd - Rational(e->exec.ns);
        return Duration{s.floor_to_int64()};
    }

    /// Carve-out attempt: an idle PE of a class other than the kind's
    /// fastest, on which the task still meets its sub-deadline; earliest
    /// estimated finish among those. Returns true if dispatched.
    bool try_carveout(PassContext &ctx, const TaskInstance &t) {
        const auto &classes = acct_->eligibility().eligible(t.kind);
        if (classes.size() < 2)
            return false;
        const PeClassId fastest = classes.front().class_id;
        std::optional<PassContext::Estimate> best;
        for (const auto &ec : classes) {
            if (ec.class_id == fastest)
                continue;
            if (t.remaining_sd - Rational(ec.exec.ns) < Rational(0))
                continue;
            for (PeId pe = 0; pe < acct_->platform().total_pes(); ++pe) {
                if (acct_->platform().class_of(pe) != ec.class_id || !ctx.idle_now(pe))
                    continue;
                PassContext::Estimate e = ctx.estimate(t, pe);
                if (!best || e.finish < best->finish || (e.finish == best->finish && e.pe < best->pe))
                    best = e;
            }
        }
        if (!best)
            return false;
        ctx.dispatch(t.id, best->pe, slack_on(t, best->pe));
        return true;
    }

    void compact_queue() {
        queue_.erase(std::remove_if(queue_.begin(), queue_.end(),
                                    [this](TaskId t) {
                                        return rt_->task(t).state != TaskState::ready;
                                    }),
                     queue_.end());
    }

    RuntimeState *rt_;
    PlatformAccounting *acct_;
    MetaSched meta_;
    HetSchedConfig cfg_;
    std::vector<TaskId> queue_;
};

} // namespace hetsched
