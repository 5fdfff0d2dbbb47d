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
#include <optional>
#include <vector>

#include "hetsched/analysis.hpp"
#include "hetsched/platform.hpp"
#include "hetsched/runtime.hpp"
#include "hetsched/time.hpp"

namespace hetsched {

enum class Policy : std::int8_t { ms_stat, ms_dyn };
enum class Ranking : std::int8_t { hom, het, hyb };

inline const char *policy_name(Policy p) { return p == Policy::ms_stat ? "ms-stat" : "ms-dyn"; }
inline const char *ranking_name(Ranking r) {
    switch (r) {
    case Ranking::hom: return "hom";
    case Ranking::het: return "het";
    case Ranking::hyb: return "hyb";
    }
    return "?";
}

struct HetSchedConfig {
    Policy policy{Policy::ms_dyn};
    Ranking ranking{Ranking::hyb};
    bool pruning_enabled{true};
    bool rank_update_enabled{true};
    std::optional<Duration> t_crit; // promotion window; unset = promotion off
    bool promote_all{false};        // promote every starved crit=1 DAG, not just the oldest
    std::int32_t window_w{4};
    bool carveout_enabled{true};

    void validate() const {
        if (window_w < 1)
            raise(Errc::config_error, "window_w must be >= 1");
        if (t_crit && t_crit->ns <= 0)
            raise(Errc::config_error, "t_crit must be positive when set");
    }
};

/// Snapshot of one task's rank inputs, cached on the TaskInstance by
/// refresh_rank and read by the ranking comparators.
///
/// rank_type counts eligible PE classes whose Eff_Slack is non-negative;
/// eff_slack_best is the slack on the fastest eligible class (which is
/// where the per-class slack peaks, so "fastest feasible class" needs no
/// separate case). The rank itself, criticality / Eff_Slack, is kept in
/// (criticality, slack) pieces; comparators order by slack within one
/// criticality level, which matches rank-descending wherever slack is
/// positive and puts overdue tasks (slack <= 0) first.
class MetaSched {
  public:
    MetaSched(RuntimeState &rt, const EligibilityTable &eligibility, HetSchedConfig cfg)
        : rt_(&rt), eligibility_(&eligibility), cfg_(cfg) {
        cfg_.validate();
    }

    const HetSchedConfig &config() const { return cfg_; }

    /// Remaining sub-deadline of a ready task at `now` under the active
    /// policy, in ns (exact). Static: the admission-time sub-deadline aged
    /// by time spent ready. Dynamic: slack-ratio share of the DAG's
    /// remaining slack, recomputed from scratch.
    Rational remaining_subdeadline(const TaskInstance &t, TimeStamp now) const {
        if (cfg_.policy == Policy::ms_stat)
            return t.remaining_sd - Rational((now - t.last_aged).ns);
        const DagInstance &d = rt_->dag(t.dag);
        const Rational slack_dag((d.absolute_deadline() - now).ns);
        return dynamic_subdeadline(rt_->analysis_of(d), static_cast<std::size_t>(t.node), slack_dag);
    }

    /// Eq. of the rank denominator: remaining sub-deadline minus the
    /// execution estimate. Negative means infeasible at that estimate.
    Rational effective_slack(const TaskInstance &t, TimeStamp now, Duration eet) const {
        return remaining_subdeadline(t, now) - Rational(eet.ns);
    }

    /// Recomputes and caches the task's rank snapshot at `now`. Ages the
    /// static budget in place (idempotent for repeated calls at one instant).
    void refresh_rank(TaskInstance &t, TimeStamp now) {
        if (cfg_.policy == Policy::ms_stat) {
            t.remaining_sd -= Rational((now - t.last_aged).ns);
            t.last_aged = now;
        } else {
            t.remaining_sd = remaining_subdeadline(t, now);
        }
        const auto &classes = eligibility_->eligible(t.kind);
        if (classes.empty())
            raise(Errc::no_eligible_pe, "kind '" + rt_->workload().kinds.at(t.kind).name +
                                            "' has no eligible PE class on this platform");
        t.rank_type = 0;
        for (const auto &ec : classes)
            if (t.remaining_sd - Rational(ec.exec.ns) >= Rational(0))
                ++t.rank_type;
        t.eff_slack_best = t.remaining_sd - Rational(classes.front().exec.ns);
        t.eff_slack_hom = t.remaining_sd - Rational(rt_->workload().kinds.at(t.kind).wcet().ns);
    }

    /// Strict weak ordering over ready tasks, highest priority first, for
    /// the configured ranking mode. Criticality is read live so promotions
    /// take effect without re-ranking.
    bool higher_priority(TaskId a_id, TaskId b_id) const {
        const TaskInstance &a = rt_->task(a_id);
        const TaskInstance &b = rt_->task(b_id);
        const int ca = criticality_level(rt_->dag(a.dag).criticality);
        const int cb = criticality_level(rt_->dag(b.dag).criticality);
        if (ca != cb)
            return ca > cb;
        switch (cfg_.ranking) {
        case Ranking::hom:
            if (a.eff_slack_hom != b.eff_slack_hom)
                return a.eff_slack_hom < b.eff_slack_hom;
            break;
        case Ranking::het:
            if (ca == 2) {
                if (a.eff_slack_best != b.eff_slack_best)
                    return a.eff_slack_best < b.eff_slack_best;
            } else if (a.rank_type != b.rank_type) {
                return a.rank_type > b.rank_type;
            }
            break;
        case Ranking::hyb:
            if (ca == 2) {
                if (a.eff_slack_best != b.eff_slack_best)
                    return a.eff_slack_best < b.eff_slack_best;
            } else {
                if (a.rank_type != b.rank_type)
                    return a.rank_type > b.rank_type;
                if (a.eff_slack_best != b.eff_slack_best)
                    return a.eff_slack_best < b.eff_slack_best;
            }
            break;
        }
        const DagInstance &da = rt_->dag(a.dag);
        const DagInstance &db = rt_->dag(b.dag);
        if (da.arrival != db.arrival)
            return da.arrival < db.arrival;
        return a.id < b.id;
    }

    /// Prune-list population rule: ready tasks of crit=1 DAGs whose
    /// rank_type dropped to 0 or 1. Call after ranks are refreshed.
    bool prune_candidate(const TaskInstance &t) const {
        return !rt_->dag(t.dag).is_critical() && t.rank_type <= 1;
    }

    /// Deadline-tracking sweep: prunes crit=1 DAGs that cannot finish by
    /// their deadline even at best-case speed along the remaining paths,
    /// plus (only while critical DAGs are present) DAGs with prune-listed
    /// ready tasks. Returns pruned DAG ids. Never touches crit=2.
    std::vector<DagInstanceId> prune_sweep(const std::vector<TaskId> &prune_list, TimeStamp now,
                                           bool critical_present) {
        std::vector<DagInstanceId> pruned;
        for (std::size_t i = 0; i < rt_->dag_count(); ++i) {
            DagInstance &d = rt_->dag(static_cast<DagInstanceId>(i));
            if (d.state != DagState::active || d.is_critical() || d.arrival > now)
                continue;
            const Duration budget = d.absolute_deadline() - now;
            if (remaining_bcet(d, now) > budget) {
                rt_->prune_dag(d.id, now);
                pruned.push_back(d.id);
            }
        }
        if (critical_present) {
            for (TaskId tid : prune_list) {
                const TaskInstance &t = rt_->task(tid);
                if (t.state != TaskState::ready)
                    continue;
                DagInstance &d = rt_->dag(t.dag);
                if (d.state == DagState::active && !d.is_critical()) {
                    rt_->prune_dag(d.id, now);
                    pruned.push_back(d.id);
                }
            }
        }
        return pruned;
    }

    /// Criticality promotion: fires when a full window of history exists,
    /// no crit=1 DAG met its deadline inside the trailing t_crit, and no
    /// promotion happened in that window. Promotes the oldest active crit=1
    /// DAG (or all of them with promote_all). Monotone by construction.
    std::vector<DagInstanceId> promote_sweep(TimeStamp now) {
        std::vector<DagInstanceId> promoted;
        if (!cfg_.t_crit)
            return promoted;
        const Duration window = *cfg_.t_crit;
        if (now.ns < window.ns)
            return promoted;
        const TimeStamp cutoff = now - window;
        if (rt_->crit1_met_since(cutoff))
            return promoted;
        if (has_promoted_ && last_promotion_ >= cutoff)
            return promoted;

        std::optional<DagInstanceId> oldest;
        for (std::size_t i = 0; i < rt_->dag_count(); ++i) {
            const DagInstance &d = rt_->dag(static_cast<DagInstanceId>(i));
            if (d.state != DagState::active || d.is_critical() || d.arrival > now)
                continue;
            if (cfg_.promote_all) {
                promoted.push_back(d.id);
            } else if (!oldest || rt_->dag(*oldest).arrival > d.arrival) {
                oldest = d.id;
            }
        }
        if (!cfg_.promote_all && oldest)
            promoted.push_back(*oldest);
        for (DagInstanceId id : promoted)
            rt_->promote_dag(id, now);
        if (!promoted.empty()) {
            has_promoted_ = true;
            last_promotion_ = now;
        }
        return promoted;
    }

    /// Best-case remaining completion span of an active DAG: the longest
    /// BCET chain still ahead, anchored at ready tasks and at the actual
    /// finish times of running ones.
    Duration remaining_bcet(const DagInstance &d, TimeStamp now) const {
        const DagAnalysis &a = rt_->analysis_of(d);
        Duration rem = Duration::zero();
        for (TaskId t = d.first_task; t < d.first_task + d.task_count; ++t) {
            const TaskInstance &ti = rt_->task(t);
            const auto n = static_cast<std::size_t>(ti.node);
            if (ti.state == TaskState::ready)
                rem = max(rem, a.bcet_bottom_level[n]);
            else if (ti.state == TaskState::running)
                rem = max(rem, (ti.finish_at - now) + a.bcet_after[n]);
        }
        return rem;
    }

  private:
    RuntimeState *rt_;
    const EligibilityTable *eligibility_;
    HetSchedConfig cfg_;
    bool has_promoted_{false};
    TimeStamp last_promotion_;
};

} // namespace hetsched
