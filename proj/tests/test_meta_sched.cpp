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

#include <catch2/catch_amalgamated.hpp>

#include "hetsched/meta_sched.hpp"

using namespace hetsched;

namespace {

// One dual-class kind (gpu 1000 ns, cpu 4000 ns), one cpu-only kind
// (2000 ns), and a kind no platform class can run.
struct Fixture {
    Workload w;
    Platform p;
    EligibilityTable elig;

    Fixture() {
        w.kinds.add(TaskKind{"dual", {{"cpu", Duration{4000}, 600}, {"gpu", Duration{1000}, 1800}}});
        w.kinds.add(TaskKind{"solo", {{"cpu", Duration{2000}, 500}}});
        w.kinds.add(TaskKind{"ghost", {{"npu", Duration{1000}, 1}}});

        DagTemplate d1{"d1", {{0, w.kinds.id_of("dual")}}, {}, {}};
        DagTemplate s1{"s1", {{0, w.kinds.id_of("solo")}}, {}, {}};
        DagTemplate chain2{"chain2",
                           {{0, w.kinds.id_of("solo")}, {1, w.kinds.id_of("solo")}},
                           {{0, 1}},
                           {}};
        DagTemplate g1{"g1", {{0, w.kinds.id_of("ghost")}}, {}, {}};
        w.add_template(d1);
        w.add_template(s1);
        w.add_template(chain2);
        w.add_template(g1);

        p.name = "fix";
        p.classes.push_back({"cpu", PeCategory::cpu, 2, 1.0, 100, false, {}});
        p.classes.push_back({"gpu", PeCategory::gpu, 1, 4.0, 100, false, {}});
        p.finalize();
        elig = EligibilityTable(p, w.kinds);
    }

    HetSchedConfig cfg(Policy pol, Ranking rank) const {
        HetSchedConfig c;
        c.policy = pol;
        c.ranking = rank;
        return c;
    }
};

} // namespace

TEST_CASE("config validation") {
    Fixture f;
    RuntimeState rt(f.w);
    HetSchedConfig bad;
    bad.window_w = 0;
    CHECK_THROWS_AS(MetaSched(rt, f.elig, bad), Error);
    bad.window_w = 4;
    bad.t_crit = Duration::zero();
    CHECK_THROWS_AS(MetaSched(rt, f.elig, bad), Error);
}

TEST_CASE("static budgets age with ready time, dynamic ones track dag slack") {
    Fixture f;

    SECTION("static") {
        RuntimeState rt(f.w);
        MetaSched ms(rt, f.elig, f.cfg(Policy::ms_stat, Ranking::hyb));
        rt.admit(f.w.template_id("d1"), TimeStamp{0}, Duration{10000}, Criticality::normal);
        TaskInstance &t = rt.task(0);
        CHECK(ms.remaining_subdeadline(t, TimeStamp{0}) == Rational(10000));
        CHECK(ms.remaining_subdeadline(t, TimeStamp{3000}) == Rational(7000));
        ms.refresh_rank(t, TimeStamp{3000});
        CHECK(t.remaining_sd == Rational(7000));
        // Re-ranking at the same instant changes nothing.
        ms.refresh_rank(t, TimeStamp{3000});
        CHECK(t.remaining_sd == Rational(7000));
        CHECK(ms.remaining_subdeadline(t, TimeStamp{5000}) == Rational(5000));
        // The budget keeps shrinking even past zero.
        CHECK(ms.remaining_subdeadline(t, TimeStamp{12000}) == Rational(-2000));
    }

    SECTION("dynamic") {
        RuntimeState rt(f.w);
        MetaSched ms(rt, f.elig, f.cfg(Policy::ms_dyn, Ranking::hyb));
        rt.admit(f.w.template_id("chain2"), TimeStamp{0}, Duration{10000}, Criticality::normal);
        // Node 0 owns half the remaining slack (2000 of 4000 ns ahead).
        TaskInstance &head = rt.task(0);
        CHECK(ms.remaining_subdeadline(head, TimeStamp{0}) == Rational(5000));
        CHECK(ms.remaining_subdeadline(head, TimeStamp{4000}) == Rational(3000));
        // The tail NODE owns all of it once running alone.
        TaskInstance &tail = rt.task(1);
        CHECK(ms.remaining_subdeadline(tail, TimeStamp{4000}) == Rational(6000));
        CHECK(ms.effective_slack(tail, TimeStamp{4000}, Duration{2000}) == Rational(4000));
    }
}

TEST_CASE("rank snapshots count feasible classes") {
    Fixture f;
    RuntimeState rt(f.w);
    MetaSched ms(rt, f.elig, f.cfg(Policy::ms_dyn, Ranking::hyb));

    auto admit_dual = [&](Duration deadline) {
        return rt.admit(f.w.template_id("d1"), TimeStamp{0}, deadline, Criticality::normal)[0];
    };
    TaskInstance &both = rt.task(admit_dual(Duration{5000}));
    ms.refresh_rank(both, TimeStamp{0});
    CHECK(both.rank_type == 2);
    CHECK(both.eff_slack_best == Rational(4000)); // gpu is fastest
    CHECK(both.eff_slack_hom == Rational(1000));  // against the 4000 ns wcet

    TaskInstance &gpu_only = rt.task(admit_dual(Duration{2000}));
    ms.refresh_rank(gpu_only, TimeStamp{0});
    CHECK(gpu_only.rank_type == 1);
    CHECK(gpu_only.eff_slack_best == Rational(1000));
    CHECK(gpu_only.eff_slack_hom == Rational(-2000));

    TaskInstance &none = rt.task(admit_dual(Duration{500}));
    ms.refresh_rank(none, TimeStamp{0});
    CHECK(none.rank_type == 0);
    CHECK(none.eff_slack_best == Rational(-500));

    // A boundary fit (slack exactly zero) still counts the class.
    TaskInstance &exact = rt.task(admit_dual(Duration{1000}));
    ms.refresh_rank(exact, TimeStamp{0});
    CHECK(exact.rank_type == 1);
    CHECK(exact.eff_slack_best == Rational(0));

    // No eligible class on this platform is a hard error.
    TaskId ghost =
        rt.admit(f.w.template_id("g1"), TimeStamp{0}, Duration{5000}, Criticality::normal)[0];
    CHECK_THROWS_AS(ms.refresh_rank(rt.task(ghost), TimeStamp{0}), Error);
}

TEST_CASE("priority order by ranking mode") {
    Fixture f;
    RuntimeState rt(f.w);

    // Four crit=1 dual tasks with deadlines chosen to spread the snapshots,
    // plus one critical task with a huge deadline.
    auto admit = [&](Duration deadline, Criticality c, TimeStamp arrival) {
        return rt.admit(f.w.template_id("d1"), arrival, deadline, c)[0];
    };
    TaskId wide = admit(Duration{9000}, Criticality::normal, TimeStamp{0});   // rank 2, best 8000
    TaskId tight = admit(Duration{5000}, Criticality::normal, TimeStamp{0});  // rank 2, best 4000
    TaskId narrow = admit(Duration{2000}, Criticality::normal, TimeStamp{0}); // rank 1, best 1000
    TaskId late = admit(Duration{9000}, Criticality::normal, TimeStamp{10});  // rank 2, best 8010
    TaskId crit = admit(Duration{50000}, Criticality::critical, TimeStamp{0});

    auto ranked = [&](Ranking r) {
        MetaSched ms(rt, f.elig, f.cfg(Policy::ms_dyn, r));
        for (TaskId t : {wide, tight, narrow, late, crit})
            ms.refresh_rank(rt.task(t), TimeStamp{0});
        std::vector<TaskId> order{wide, tight, narrow, late, crit};
        std::sort(order.begin(), order.end(),
                  [&](TaskId a, TaskId b) { return ms.higher_priority(a, b); });
        return order;
    };

    // Criticality always dominates; 50 ms of slack still outranks 1 us.
    CHECK(ranked(Ranking::hom).front() == crit);
    CHECK(ranked(Ranking::het).front() == crit);
    CHECK(ranked(Ranking::hyb).front() == crit);

    // hom: ascending wcet-based slack. best-class slack plays no role.
    CHECK(ranked(Ranking::hom) == std::vector<TaskId>{crit, narrow, tight, wide, late});

    // het: crit=1 tasks by descending flexibility; ties fall to arrival then id.
    CHECK(ranked(Ranking::het) == std::vector<TaskId>{crit, wide, tight, late, narrow});

    // hyb: flexibility first, then ascending best-class slack.
    CHECK(ranked(Ranking::hyb) == std::vector<TaskId>{crit, tight, wide, late, narrow});

    // Two critical tasks order by best-class slack in het and hyb.
    TaskId crit2 = admit(Duration{3000}, Criticality::critical, TimeStamp{0});
    MetaSched ms(rt, f.elig, f.cfg(Policy::ms_dyn, Ranking::het));
    ms.refresh_rank(rt.task(crit), TimeStamp{0});
    ms.refresh_rank(rt.task(crit2), TimeStamp{0});
    CHECK(ms.higher_priority(crit2, crit));
    CHECK_FALSE(ms.higher_priority(crit, crit2));
}

TEST_CASE("overdue tasks sort ahead of comfortable ones") {
    Fixture f;
    RuntimeState rt(f.w);
    MetaSched ms(rt, f.elig, f.cfg(Policy::ms_dyn, Ranking::hyb));
    TaskId ok = rt.admit(f.w.template_id("d1"), TimeStamp{0}, Duration{9000}, Criticality::critical)[0];
    TaskId due = rt.admit(f.w.template_id("d1"), TimeStamp{0}, Duration{800}, Criticality::critical)[0];
    ms.refresh_rank(rt.task(ok), TimeStamp{0});
    ms.refresh_rank(rt.task(due), TimeStamp{0});
    CHECK(rt.task(due).eff_slack_best.is_negative());
    CHECK(ms.higher_priority(due, ok));
}

TEST_CASE("prune candidates are inflexible normal tasks") {
    Fixture f;
    RuntimeState rt(f.w);
    MetaSched ms(rt, f.elig, f.cfg(Policy::ms_dyn, Ranking::hyb));
    TaskId flexible =
        rt.admit(f.w.template_id("d1"), TimeStamp{0}, Duration{9000}, Criticality::normal)[0];
    TaskId squeezed =
        rt.admit(f.w.template_id("d1"), TimeStamp{0}, Duration{2000}, Criticality::normal)[0];
    TaskId crit =
        rt.admit(f.w.template_id("d1"), TimeStamp{0}, Duration{2000}, Criticality::critical)[0];
    for (TaskId t : {flexible, squeezed, crit})
        ms.refresh_rank(rt.task(t), TimeStamp{0});
    CHECK_FALSE(ms.prune_candidate(rt.task(flexible)));
    CHECK(ms.prune_candidate(rt.task(squeezed)));
    CHECK_FALSE(ms.prune_candidate(rt.task(crit)));
}

TEST_CASE("prune sweep applies the best-case rule unconditionally") {
    Fixture f;
    RuntimeState rt(f.w);
    MetaSched ms(rt, f.elig, f.cfg(Policy::ms_dyn, Ranking::hyb));

    // solo needs 2000 ns best case; by t=1500 a 3000 ns deadline is lost.
    DagInstanceId doomed = 0;
    rt.admit(f.w.template_id("s1"), TimeStamp{0}, Duration{3000}, Criticality::normal);
    rt.admit(f.w.template_id("s1"), TimeStamp{0}, Duration{9000}, Criticality::normal);
    // Critical DAGs are exempt no matter how hopeless.
    rt.admit(f.w.template_id("s1"), TimeStamp{0}, Duration{100}, Criticality::critical);
    // Future arrivals are not yet the scheduler's business.
    rt.admit(f.w.template_id("s1"), TimeStamp{99000}, Duration{100}, Criticality::normal);

    std::vector<DagInstanceId> pruned = ms.prune_sweep({}, TimeStamp{1500}, false);
    CHECK(pruned == std::vector<DagInstanceId>{doomed});
    CHECK(rt.dag(0).state == DagState::pruned);
    CHECK(rt.dag(1).state == DagState::active);
    CHECK(rt.dag(2).state == DagState::active);
    CHECK(rt.dag(3).state == DagState::active);
}

TEST_CASE("prune sweep anchors estimates on running-task finish times") {
    Fixture f;
    RuntimeState rt(f.w);
    MetaSched ms(rt, f.elig, f.cfg(Policy::ms_dyn, Ranking::hyb));
    // dag0: loose deadline; dag1: the same chain but 1500 ns short.
    rt.admit(f.w.template_id("chain2"), TimeStamp{0}, Duration{9500}, Criticality::normal);
    rt.admit(f.w.template_id("chain2"), TimeStamp{0}, Duration{8000}, Criticality::normal);
    rt.mark_running(0, 0, TimeStamp{0}, TimeStamp{7000});
    rt.mark_running(2, 1, TimeStamp{0}, TimeStamp{7000});

    // With the head pinned to finish at 7000 and the tail needing 2000 more,
    // the best case lands at 9000: past dag1's deadline, inside dag0's.
    CHECK(ms.remaining_bcet(rt.dag(0), TimeStamp{1000}) == Duration{8000});
    std::vector<DagInstanceId> pruned = ms.prune_sweep({}, TimeStamp{1000}, false);
    CHECK(pruned == std::vector<DagInstanceId>{1});
    CHECK(rt.dag(0).state == DagState::active);
    CHECK(rt.dag(1).state == DagState::pruned);
    CHECK(rt.task(2).state == TaskState::running);

    // Once the head completes, the ready tail carries the estimate: 2000 ns
    // against a budget that runs out at 7500.
    rt.on_complete(0, TimeStamp{7000});
    CHECK(ms.remaining_bcet(rt.dag(0), TimeStamp{7000}) == Duration{2000});
    CHECK(ms.prune_sweep({}, TimeStamp{7000}, false).empty());
    pruned = ms.prune_sweep({}, TimeStamp{7601}, false);
    CHECK(pruned == std::vector<DagInstanceId>{0});
}

TEST_CASE("rank-based pruning only fires while critical work is present") {
    Fixture f;

    auto build = [&](bool critical_present) {
        RuntimeState rt(f.w);
        MetaSched ms(rt, f.elig, f.cfg(Policy::ms_dyn, Ranking::hyb));
        TaskId squeezed =
            rt.admit(f.w.template_id("d1"), TimeStamp{0}, Duration{2000}, Criticality::normal)[0];
        ms.refresh_rank(rt.task(squeezed), TimeStamp{0});
        REQUIRE(ms.prune_candidate(rt.task(squeezed)));
        std::vector<DagInstanceId> pruned =
            ms.prune_sweep({squeezed}, TimeStamp{0}, critical_present);
        return std::make_pair(pruned.size(), rt.dag(0).state);
    };

    auto calm = build(false);
    CHECK(calm.first == 0);
    CHECK(calm.second == DagState::active);
    auto pressured = build(true);
    CHECK(pressured.first == 1);
    CHECK(pressured.second == DagState::pruned);
}

TEST_CASE("promotion waits out the starvation window") {
    Fixture f;
    RuntimeState rt(f.w);
    HetSchedConfig cfg = f.cfg(Policy::ms_dyn, Ranking::hyb);
    cfg.t_crit = Duration{10000};
    MetaSched ms(rt, f.elig, cfg);

    // dag0 completes in time at t=1500, arming the anchor.
    rt.admit(f.w.template_id("s1"), TimeStamp{0}, Duration{2000}, Criticality::normal);
    rt.mark_running(0, 0, TimeStamp{0}, TimeStamp{1500});
    rt.on_complete(0, TimeStamp{1500});
    // Two long-deadline normal DAGs stay active.
    rt.admit(f.w.template_id("s1"), TimeStamp{2000}, Duration{300000}, Criticality::normal);
    rt.admit(f.w.template_id("s1"), TimeStamp{3000}, Duration{300000}, Criticality::normal);

    // No full window of history yet.
    CHECK(ms.promote_sweep(TimeStamp{5000}).empty());
    // Window covers the t=1500 success: starvation not established.
    CHECK(ms.promote_sweep(TimeStamp{11000}).empty());
    // Success fell out of the window: promote the oldest normal DAG.
    std::vector<DagInstanceId> first = ms.promote_sweep(TimeStamp{11501});
    CHECK(first == std::vector<DagInstanceId>{1});
    CHECK(rt.dag(1).is_critical());
    CHECK(rt.dag(1).promoted);
    // A fresh promotion inhibits the next sweep inside the window.
    CHECK(ms.promote_sweep(TimeStamp{12000}).empty());
    // Once that promotion ages out, the remaining normal DAG follows.
    std::vector<DagInstanceId> second = ms.promote_sweep(TimeStamp{21502});
    CHECK(second == std::vector<DagInstanceId>{2});
    // Nothing left to promote.
    CHECK(ms.promote_sweep(TimeStamp{31503}).empty());
}

TEST_CASE("promote_all lifts every starved normal DAG at once") {
    Fixture f;
    RuntimeState rt(f.w);
    HetSchedConfig cfg = f.cfg(Policy::ms_dyn, Ranking::hyb);
    cfg.t_crit = Duration{10000};
    cfg.promote_all = true;
    MetaSched ms(rt, f.elig, cfg);
    rt.admit(f.w.template_id("s1"), TimeStamp{100}, Duration{300000}, Criticality::normal);
    rt.admit(f.w.template_id("s1"), TimeStamp{200}, Duration{300000}, Criticality::normal);
    std::vector<DagInstanceId> promoted = ms.promote_sweep(TimeStamp{10000});
    CHECK(promoted == std::vector<DagInstanceId>{0, 1});
    CHECK(rt.dag(0).is_critical());
    CHECK(rt.dag(1).is_critical());
}

TEST_CASE("promotion disabled without a window") {
    Fixture f;
    RuntimeState rt(f.w);
    MetaSched ms(rt, f.elig, f.cfg(Policy::ms_dyn, Ranking::hyb));
    rt.admit(f.w.template_id("s1"), TimeStamp{0}, Duration{300000}, Criticality::normal);
    CHECK(ms.promote_sweep(TimeStamp{1000000}).empty());
    CHECK_FALSE(rt.dag(0).is_critical());
}
