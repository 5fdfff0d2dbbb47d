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

#include <functional>
#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "hetsched/platform.hpp"
#include "hetsched/runtime.hpp"
#include "hetsched/scheduler.hpp"
#include "hetsched/time.hpp"

namespace hetsched {

/// One DAG release: the engine-facing (template-resolved) trace entry.
struct ResolvedEntry {
    TimeStamp arrival;
    TemplateId tmpl{0};
    Criticality criticality{Criticality::normal};
    Duration deadline;
};

struct DagOutcome {
    DagInstanceId id{0};
    TemplateId tmpl{0};
    TimeStamp arrival;
    Duration deadline;
    Criticality criticality; // final (post-promotion) level
    bool promoted{false};
    DagState state{DagState::active};
    TimeStamp completion; // set for every terminal state (prune time for pruned)
};

struct PeLedger {
    PeId pe{kInvalidPe};
    std::string class_name;
    Duration busy;
    Duration exec;
    Duration idle;
    EnergyQ32 dynamic_energy;
    EnergyQ32 static_energy;
};

struct SimResult {
    std::string scheduler_name;
    std::vector<std::string> event_log; // JSON lines, chronological
    std::vector<TaskRecord> tasks;
    std::vector<DagOutcome> dags;
    std::vector<PeLedger> pes;
    TimeStamp horizon;
    EnergyQ32 total_energy;
    std::int64_t pruned_dags{0};
    std::int64_t promoted_dags{0};
};

struct SimOptions {
    Duration sched_overhead; // per-dispatch decision cost, default 0
    bool keep_event_log{true};
};

using SchedulerFactory =
    std::function<std::unique_ptr<SchedulerBase>(RuntimeState &, PlatformAccounting &)>;

namespace detail {

struct PendingCompletion {
    TimeStamp time;
    PeId pe;
    TaskId task;
    bool operator>(const PendingCompletion &o) const {
        if (time != o.time)
            return time > o.time;
        return pe > o.pe;
    }
};

inline void append_kv(std::string &s, const char *key, std::int64_t v) {
    s += ",\"";
    s += key;
    s += "\":";
    s += std::to_string(v);
}

inline void append_kv(std::string &s, const char *key, const std::string &v) {
    s += ",\"";
    s += key;
    s += "\":\"";
    s += v;
    s += "\"";
}

inline std::string log_head(TimeStamp t, const char *ev) {
    std::string s = "{\"t\":";
    s += std::to_string(t.ns);
    s += ",\"ev\":\"";
    s += ev;
    s += "\"";
    return s;
}

} // namespace detail

/// Runs one mission: feeds trace arrivals and completion events to the
/// scheduler, one assignment pass per event batch. Deterministic: within a
/// timestamp, completions precede arrivals; simultaneous completions are
/// handled in ascending PE id order; arrivals in trace order.
inline SimResult run(const Workload &workload, const Platform &platform,
                     const std::vector<ResolvedEntry> &trace, const SchedulerFactory &make_sched,
                     const SimOptions &options = {}) {
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i].arrival < trace[i - 1].arrival)
            raise(Errc::non_monotone_trace,
                  "trace entry " + std::to_string(i) + " arrives before its predecessor");

    RuntimeState rt(workload);
    PlatformAccounting acct(platform, workload.kinds, options.sched_overhead);
    std::unique_ptr<SchedulerBase> sched = make_sched(rt, acct);

    SimResult result;
    result.scheduler_name = sched->name();

    std::priority_queue<detail::PendingCompletion, std::vector<detail::PendingCompletion>,
                        std::greater<detail::PendingCompletion>>
        completions;
    std::size_t next_arrival = 0;
    std::size_t records_seen = 0;
    TimeStamp horizon = TimeStamp::zero();

    auto emit = [&](std::string line) {
        if (options.keep_event_log)
            result.event_log.push_back(std::move(line));
    };
    auto drain_journal = [&]() {
        for (const DagTransition &tr : rt.take_journal()) {
            const DagInstance &d = rt.dag(tr.dag);
            switch (tr.kind) {
            case DagTransition::Kind::done: {
                std::string s = detail::log_head(tr.time, "dag_done");
                detail::append_kv(s, "dag", d.id);
                detail::append_kv(s, "state", std::string(dag_state_name(d.state)));
                detail::append_kv(s, "lateness_ns", (d.completion - d.absolute_deadline()).ns);
                emit(s + "}");
                break;
            }
            case DagTransition::Kind::pruned: {
                std::string s = detail::log_head(tr.time, "prune");
                detail::append_kv(s, "dag", d.id);
                emit(s + "}");
                break;
            }
            case DagTransition::Kind::promoted: {
                std::string s = detail::log_head(tr.time, "promote");
                detail::append_kv(s, "dag", d.id);
                emit(s + "}");
                break;
            }
            }
        }
    };

    while (next_arrival < trace.size() || !completions.empty()) {
        TimeStamp now;
        if (!completions.empty() &&
            (next_arrival >= trace.size() || completions.top().time <= trace[next_arrival].arrival))
            now = completions.top().time;
        else
            now = trace[next_arrival].arrival;
        horizon = max(horizon, now);

        while (!completions.empty() && completions.top().time == now) {
            const detail::PendingCompletion c = completions.top();
            completions.pop();
            std::vector<TaskId> newly_ready = rt.on_complete(c.task, now);
            std::string s = detail::log_head(now, "complete");
            detail::append_kv(s, "task", c.task);
            detail::append_kv(s, "pe", c.pe);
            emit(s + "}");
            sched->on_completed({c.task, c.pe, now}, now);
            if (!newly_ready.empty())
                sched->on_ready(newly_ready, now);
        }

        while (next_arrival < trace.size() && trace[next_arrival].arrival == now) {
            const ResolvedEntry &e = trace[next_arrival++];
            std::vector<TaskId> ready = rt.admit(e.tmpl, e.arrival, e.deadline, e.criticality);
            const DagInstance &d = rt.dag(static_cast<DagInstanceId>(rt.dag_count()) - 1);
            std::string s = detail::log_head(now, "arrival");
            detail::append_kv(s, "dag", d.id);
            detail::append_kv(s, "tmpl", workload.structure(d.tmpl).name);
            detail::append_kv(s, "crit", criticality_level(d.criticality));
            detail::append_kv(s, "deadline_ns", d.deadline.ns);
            emit(s + "}");
            sched->on_ready(ready, now);
        }

        drain_journal();

        PassContext ctx(rt, acct, now);
        sched->assignment_pass(ctx);
        drain_journal();
        for (; records_seen < acct.records().size(); ++records_seen) {
            const TaskRecord &r = acct.records()[records_seen];
            std::string s = detail::log_head(now, "dispatch");
            detail::append_kv(s, "task", r.task);
            detail::append_kv(s, "dag", r.dag);
            detail::append_kv(s, "node", r.node);
            detail::append_kv(s, "pe", r.pe);
            detail::append_kv(s, "class", platform.classes[static_cast<std::size_t>(r.cls)].name);
            detail::append_kv(s, "setup_ns", r.setup.ns);
            detail::append_kv(s, "exec_ns", r.exec.ns);
            detail::append_kv(s, "finish", r.finish.ns);
            detail::append_kv(s, "freq_hz", r.freq_hz);
            detail::append_kv(s, "slack_ns", r.slack.ns);
            detail::append_kv(s, "n_busy", r.n_busy);
            emit(s + "}");
            completions.push({r.finish, r.pe, r.task});
        }
    }

    for (const DagInstance &d : rt.dags())
        if (d.state == DagState::active)
            raise(Errc::incomplete_run,
                  "DAG " + std::to_string(d.id) + " still active after event quiescence");

    result.horizon = horizon;
    result.tasks = acct.records();
    result.dags.reserve(rt.dag_count());
    for (const DagInstance &d : rt.dags())
        result.dags.push_back({d.id, d.tmpl, d.arrival, d.deadline, d.criticality, d.promoted,
                               d.state, d.completion});
    result.pruned_dags = rt.pruned_dags();
    result.promoted_dags = rt.promoted_dags();

    EnergyQ32 total;
    for (PeId pe = 0; pe < platform.total_pes(); ++pe) {
        PeLedger l;
        l.pe = pe;
        l.class_name = platform.pe_class(pe).name;
        l.busy = Duration{acct.busy_ns(pe)};
        l.exec = Duration{acct.exec_ns(pe)};
        l.idle = (horizon - TimeStamp::zero()) - l.busy;
        if (l.idle.is_negative())
            raise(Errc::invalid_state, "PE busy beyond the simulation horizon");
        l.dynamic_energy = acct.dyn_energy(pe);
        l.static_energy =
            EnergyQ32::from_mw_ns(platform.pe_class(pe).static_power_mw, l.idle.ns);
        total += l.dynamic_energy + l.static_energy;
        result.pes.push_back(std::move(l));
    }
    result.total_energy = total;
    return result;
}

} // namespace hetsched
