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
#include <optional>
#include <vector>

#include "hetsched/platform.hpp"
#include "hetsched/runtime.hpp"
#include "hetsched/time.hpp"

namespace hetsched {

struct CompletionRecord {
    TaskId task{0};
    PeId pe{kInvalidPe};
    TimeStamp time;
};

/// Full dispatch record: enough to recompute contention, DVFS selection and
/// energy offline (schedule replay) without re-running the scheduler.
struct TaskRecord {
    TaskId task{0};
    DagInstanceId dag{0};
    std::int32_t node{0};
    KindId kind{kInvalidKind};
    PeId pe{kInvalidPe};
    PeClassId cls{0};
    TimeStamp commit_time;
    TimeStamp exec_start;
    TimeStamp finish;
    Duration setup;        // overhead + data movement, occupies the PE
    Duration exec;         // actual (contended, frequency-scaled)
    Duration profile_exec; // uncontended nominal profile time
    std::int32_t n_busy{0};
    Duration slack;        // slack_for_task after flooring at zero
    std::int64_t freq_hz{0};
    std::int64_t power_scale_q32{std::int64_t{1} << 32};
    std::int64_t power_mw{0};
    EnergyQ32 energy;
};

/// Shared per-run platform state: PE occupancy and the energy/busy ledgers.
/// Every scheduler dispatches through commit(), so accounting is identical
/// across policies by construction.
class PlatformAccounting {
  public:
    PlatformAccounting(const Platform &platform, const KindTable &kinds,
                       Duration sched_overhead = Duration::zero())
        : platform_(&platform), eligibility_(platform, kinds), sched_overhead_(sched_overhead),
          busy_until_(static_cast<std::size_t>(platform.total_pes()), TimeStamp::zero()),
          busy_ns_(static_cast<std::size_t>(platform.total_pes()), 0),
          exec_ns_(static_cast<std::size_t>(platform.total_pes()), 0),
          dyn_energy_(static_cast<std::size_t>(platform.total_pes())) {}

    const Platform &platform() const { return *platform_; }
    const EligibilityTable &eligibility() const { return eligibility_; }
    Duration sched_overhead() const { return sched_overhead_; }

    TimeStamp busy_until(PeId pe) const { return busy_until_[static_cast<std::size_t>(pe)]; }

    std::int32_t busy_count_at(TimeStamp t, PeId excluding = kInvalidPe) const {
        std::int32_t n = 0;
        for (std::size_t i = 0; i < busy_until_.size(); ++i)
            if (static_cast<PeId>(i) != excluding && busy_until_[i] > t)
                ++n;
        return n;
    }

    /// Total inbound data-movement latency for running `task` on `pe`,
    /// summed over its parents' recorded placements.
    Duration data_move_for(const RuntimeState &rt, const TaskInstance &task, PeId pe) const {
        const DagInstance &d = rt.dag(task.dag);
        const DagStructure &s = rt.structure_of(d);
        Duration dm = Duration::zero();
        for (std::int32_t p : s.parents[static_cast<std::size_t>(task.node)]) {
            const TaskInstance &parent = rt.task(d.task_for_node(p));
            auto it = s.payload_bytes.find({p, task.node});
            const std::int64_t bytes = it != s.payload_bytes.end()
                                           ? it->second
                                           : rt.workload().kinds.at(parent.kind).output_bytes;
            dm += platform_->data_move(parent.pe, pe, bytes);
        }
        return dm;
    }

    /// Commits a dispatch decided at `now`: applies DVFS selection using
    /// `slack_for_task`, contention at the commit instant, books the busy
    /// window [now, finish) and the dynamic energy. Returns the record.
    TaskRecord commit(RuntimeState &rt, TaskId task_id, PeId pe, TimeStamp now,
                      Duration slack_for_task) {
        const TaskInstance &task = rt.task(task_id);
        if (busy_until(pe) > now)
            raise(Errc::invalid_state, "dispatch to a busy PE");
        const PeClassId cls_id = platform_->class_of(pe);
        const PeClass &cls = platform_->classes[static_cast<std::size_t>(cls_id)];
        const EligibleClass *entry = eligibility_.entry(task.kind, cls_id);
        if (entry == nullptr)
            raise(Errc::ineligible_pe, "task kind cannot run on PE class '" + cls.name + "'");

        TaskRecord r;
        r.task = task_id;
        r.dag = task.dag;
        r.node = task.node;
        r.kind = task.kind;
        r.pe = pe;
        r.cls = cls_id;
        r.commit_time = now;
        r.profile_exec = entry->exec;
        r.power_mw = entry->power_mw;
        r.slack = max(slack_for_task, Duration::zero());
        r.n_busy = busy_count_at(now, pe);

        const DvfsPoint &point = platform_->dvfs_select(cls, entry->exec, r.slack);
        r.freq_hz = point.freq_hz;
        r.power_scale_q32 = point.power_scale_q32;
        r.exec = platform_->scaled_exec(entry->exec, cls, point.freq_hz, r.n_busy);
        r.setup = sched_overhead_ + data_move_for(rt, task, pe);
        r.exec_start = now + r.setup;
        r.finish = r.exec_start + r.exec;
        r.energy = EnergyQ32::from_mw_ns(r.power_mw, r.exec.ns, r.power_scale_q32);

        const auto i = static_cast<std::size_t>(pe);
        busy_until_[i] = r.finish;
        busy_ns_[i] += (r.finish - now).ns;
        exec_ns_[i] += r.exec.ns;
        dyn_energy_[i] += r.energy;

        rt.mark_running(task_id, pe, now, r.finish);
        records_.push_back(r);
        return r;
    }

    const std::vector<TaskRecord> &records() const { return records_; }
    std::int64_t busy_ns(PeId pe) const { return busy_ns_[static_cast<std::size_t>(pe)]; }
    std::int64_t exec_ns(PeId pe) const { return exec_ns_[static_cast<std::size_t>(pe)]; }
    EnergyQ32 dyn_energy(PeId pe) const { return dyn_energy_[static_cast<std::size_t>(pe)]; }

  private:
    const Platform *platform_;
    EligibilityTable eligibility_;
    Duration sched_overhead_;
    std::vector<TimeStamp> busy_until_;
    std::vector<std::int64_t> busy_ns_;
    std::vector<std::int64_t> exec_ns_;
    std::vector<EnergyQ32> dyn_energy_;
    std::vector<TaskRecord> records_;
};

/// Scratch view of one assignment pass. Estimates use committed occupancy
/// plus the provisional reservations made earlier in the same pass, at
/// nominal frequency with the current contention snapshot; commits update
/// both views immediately so later-examined tasks see them.
class PassContext {
  public:
    PassContext(RuntimeState &rt, PlatformAccounting &acct, TimeStamp now)
        : rt_(&rt), acct_(&acct), now_(now),
          avail_(static_cast<std::size_t>(acct.platform().total_pes())) {
        for (std::size_t i = 0; i < avail_.size(); ++i)
            avail_[i] = hetsched::max(acct.busy_until(static_cast<PeId>(i)), now);
    }

    TimeStamp now() const { return now_; }
    RuntimeState &runtime() { return *rt_; }
    const PlatformAccounting &accounting() const { return *acct_; }

    TimeStamp avail(PeId pe) const { return avail_[static_cast<std::size_t>(pe)]; }
    bool idle_now(PeId pe) const { return avail(pe) == now_; }

    struct Estimate {
        PeId pe{kInvalidPe};
        TimeStamp start;
        Duration dm;
        Duration exec;
        TimeStamp finish;
    };

    /// Finish-time estimate for one concrete PE.
    Estimate estimate(const TaskInstance &task, PeId pe) const {
        const PeClassId cls_id = acct_->platform().class_of(pe);
        const EligibleClass *entry = acct_->eligibility().entry(task.kind, cls_id);
        if (entry == nullptr)
            raise(Errc::ineligible_pe, "estimate on an ineligible PE class");
        Estimate e;
        e.pe = pe;
        e.start = avail(pe);
        e.dm = acct_->data_move_for(*rt_, task, pe);
        const PeClass &cls = acct_->platform().classes[static_cast<std::size_t>(cls_id)];
        e.exec = acct_->platform().scaled_exec(entry->exec, cls,
                                               cls.nominal_freq_hz(),
                                               acct_->busy_count_at(now_, pe));
        e.finish = e.start + e.dm + e.exec;
        return e;
    }

    /// Earliest-estimated-finish PE for the task over its eligible classes,
    /// optionally restricted; ties break on lower PE id. Returns nothing iff
    /// the filter admits no PE; with no filter, raises NoEligiblePe when the
    /// platform cannot run the kind at all.
    template <typename ClassFilter>
    std::optional<Estimate> best_pe(const TaskInstance &task, ClassFilter &&admit_class) const {
        std::optional<Estimate> best;
        const auto &classes = acct_->eligibility().eligible(task.kind);
        if (classes.empty())
            raise(Errc::no_eligible_pe,
                  "kind '" + rt_->workload().kinds.at(task.kind).name + "' has no eligible PE class");
        for (const auto &ec : classes) {
            if (!admit_class(ec.class_id))
                continue;
            for (PeId pe = 0; pe < acct_->platform().total_pes(); ++pe) {
                if (acct_->platform().class_of(pe) != ec.class_id)
                    continue;
                Estimate e = estimate(task, pe);
                if (!best || e.finish < best->finish ||
                    (e.finish == best->finish && e.pe < best->pe))
                    best = e;
            }
        }
        return best;
    }

    std::optional<Estimate> best_pe(const TaskInstance &task) const {
        return best_pe(task, [](PeClassId) { return true; });
    }

    /// Provisional hold of a PE until `until`; visible to later estimates in
    /// this pass only. Successive reservations on one PE stack end-to-start,
    /// so holds never overlap.
    void reserve(PeId pe, TimeStamp until) {
        auto &slot = avail_[static_cast<std::size_t>(pe)];
        slot = hetsched::max(slot, until);
        reservations_.push_back({pe, until});
    }

    /// Commits a dispatch immediately (the PE must be startable now).
    const TaskRecord &dispatch(TaskId task, PeId pe, Duration slack_for_task) {
        if (!idle_now(pe))
            raise(Errc::invalid_state, "dispatch on a PE that cannot start now");
        const TaskRecord &r = acct_->commit(*rt_, task, pe, now_, slack_for_task);
        avail_[static_cast<std::size_t>(pe)] = r.finish;
        dispatched_.push_back(r.task);
        return acct_->records().back();
    }

    const std::vector<TaskId> &dispatched() const { return dispatched_; }
    const std::vector<std::pair<PeId, TimeStamp>> &reservations() const { return reservations_; }

  private:
    RuntimeState *rt_;
    PlatformAccounting *acct_;
    TimeStamp now_;
    std::vector<TimeStamp> avail_;
    std::vector<TaskId> dispatched_;
    std::vector<std::pair<PeId, TimeStamp>> reservations_;
};

/// The interface the engine drives. Implementations keep their ready-queue
/// policy private; dependency tracking lives in RuntimeState and platform
/// accounting in PlatformAccounting, shared by all of them.
class SchedulerBase {
  public:
    virtual ~SchedulerBase() = default;
    virtual std::string name() const = 0;

    /// Tasks that just became ready (admission or parent completion).
    virtual void on_ready(const std::vector<TaskId> &tasks, TimeStamp now) = 0;

    /// Completed-queue feedback, ascending PE id within a batch.
    virtual void on_completed(const CompletionRecord &entry, TimeStamp now) { (void)entry; (void)now; }

    /// One assignment pass at ctx.now(); dispatch/reserve through ctx.
    virtual void assignment_pass(PassContext &ctx) = 0;
};

} // namespace hetsched
