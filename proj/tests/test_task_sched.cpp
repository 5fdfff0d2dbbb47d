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

#include "hetsched/task_sched.hpp"

using namespace hetsched;

namespace {

// PE ids on this platform: cpu0=0, cpu1=1, gpu=2.
struct Fixture {
    Workload wl;
    Platform p;

    Fixture() {
        wl.kinds.add(TaskKind{"gfast", {{"gpu", Duration{1000}, 500}}});
        wl.kinds.add(TaskKind{"dual", {{"cpu", Duration{4000}, 600}, {"gpu", Duration{1000}, 1800}}});
        wl.kinds.add(TaskKind{"conly", {{"cpu", Duration{2000}, 500}}});
        wl.add_template(DagTemplate{"g1", {{0, wl.kinds.id_of("gfast")}}, {}, {}});
        wl.add_template(DagTemplate{"d1", {{0, wl.kinds.id_of("dual")}}, {}, {}});
        wl.add_template(DagTemplate{"c1", {{0, wl.kinds.id_of("conly")}}, {}, {}});

        p.name = "ts";
        p.classes.push_back({"cpu", PeCategory::cpu, 2, 1.0, 100, false, {}});
        p.classes.push_back({"gpu", PeCategory::gpu, 1, 4.0, 100, false, {}});
        p.finalize();
    }
};

} // namespace

TEST_CASE("pass context estimates honor reservations") {
    Fixture f;
    RuntimeState rt(f.wl);
    PlatformAccounting acct(f.p, f.wl.kinds);
    rt.admit(f.wl.template_id("c1"), TimeStamp{0}, Duration{600000}, Criticality::normal);

    PassContext ctx(rt, acct, TimeStamp{0});
    CHECK(ctx.idle_now(0));
    ctx.reserve(0, TimeStamp{2000});
    CHECK(ctx.avail(0) == TimeStamp{2000});
    CHECK_FALSE(ctx.idle_now(0));
    // A shorter hold on the same PE never rolls the horizon back.
    ctx.reserve(0, TimeStamp{1500});
    CHECK(ctx.avail(0) == TimeStamp{2000});
    CHECK(ctx.reservations().size() == 2);

    PassContext::Estimate held = ctx.estimate(rt.task(0), 0);
    CHECK(held.start == TimeStamp{2000});
    CHECK(held.finish == TimeStamp{4000});
    // Dispatching onto a held PE is a state error; the free sibling wins.
    CHECK_THROWS_AS(ctx.dispatch(0, 0, Duration::zero()), Error);
    auto best = ctx.best_pe(rt.task(0));
    REQUIRE(best.has_value());
    CHECK(best->pe == 1);
    CHECK(best->finish == TimeStamp{2000});

    const TaskRecord &r = ctx.dispatch(0, 1, Duration::zero());
    CHECK(r.pe == 1);
    CHECK(ctx.avail(1) == r.finish);
    CHECK(ctx.dispatched() == std::vector<TaskId>{0});
    // The commit is visible to the shared accounting immediately.
    CHECK(acct.busy_until(1) == r.finish);
}

TEST_CASE("window width bounds the assignment walk") {
    Fixture f;

    auto run = [&](std::int32_t w) {
        RuntimeState rt(f.wl);
        PlatformAccounting acct(f.p, f.wl.kinds);
        HetSchedConfig cfg;
        cfg.window_w = w;
        // Pruning off: the single-class task behind the head must stay in
        // the queue so the walk itself is what gets observed.
        cfg.pruning_enabled = false;
        HetSchedScheduler hs(rt, acct, cfg);

        // Occupy the gpu with a gpu-only task.
        hs.on_ready(rt.admit(f.wl.template_id("g1"), TimeStamp{0}, Duration{600000},
                             Criticality::normal),
                    TimeStamp{0});
        PassContext warm(rt, acct, TimeStamp{0});
        hs.assignment_pass(warm);
        REQUIRE(warm.dispatched() == std::vector<TaskId>{0});
        REQUIRE(acct.busy_until(2) == TimeStamp{1000});

        // Head of queue: critical task whose best PE is the busy gpu.
        hs.on_ready(rt.admit(f.wl.template_id("d1"), TimeStamp{0}, Duration{600000},
                             Criticality::critical),
                    TimeStamp{0});
        hs.on_ready(rt.admit(f.wl.template_id("c1"), TimeStamp{0}, Duration{600000},
                             Criticality::normal),
                    TimeStamp{0});
        PassContext ctx(rt, acct, TimeStamp{0});
        hs.assignment_pass(ctx);
        return std::make_tuple(ctx.dispatched(), ctx.reservations(), hs.ready_queue());
    };

    // w=1: the head reserves the gpu and blocks everything behind it.
    auto [d1, r1, q1] = run(1);
    CHECK(d1.empty());
    REQUIRE(r1.size() == 1);
    CHECK(r1[0].first == 2);
    CHECK(r1[0].second == TimeStamp{2000});
    CHECK(q1.size() == 2);

    // w=2: the head still waits for the gpu, but the cpu task behind it runs.
    auto [d2, r2, q2] = run(2);
    CHECK(d2 == std::vector<TaskId>{2});
    REQUIRE(r2.size() == 1);
    CHECK(r2[0].first == 2);
    CHECK(q2 == std::vector<TaskId>{1});
}

TEST_CASE("carve-out steers normal tasks onto idle slower classes") {
    Fixture f;

    // Returns the PE the dual-class task ended up on, or -1 if it waited.
    auto place_dual = [&](bool carveout, Criticality other, Duration dual_deadline) {
        RuntimeState rt(f.wl);
        PlatformAccounting acct(f.p, f.wl.kinds);
        HetSchedConfig cfg;
        cfg.carveout_enabled = carveout;
        HetSchedScheduler hs(rt, acct, cfg);

        hs.on_ready(rt.admit(f.wl.template_id("g1"), TimeStamp{0}, Duration{600000}, other),
                    TimeStamp{0});
        hs.on_ready(rt.admit(f.wl.template_id("d1"), TimeStamp{0}, dual_deadline,
                             Criticality::normal),
                    TimeStamp{0});
        PassContext ctx(rt, acct, TimeStamp{0});
        hs.assignment_pass(ctx);
        return rt.task(1).state == TaskState::running ? rt.task(1).pe : PeId{-1};
    };

    // Critical work in flight: the normal task yields the gpu and takes cpu0.
    CHECK(place_dual(true, Criticality::critical, Duration{600000}) == 0);
    // Too tight for the cpu: the carve-out declines and the task waits.
    CHECK(place_dual(true, Criticality::critical, Duration{3000}) == PeId{-1});
    // Carve-out disabled: it waits for its earliest-finish class instead.
    CHECK(place_dual(false, Criticality::critical, Duration{600000}) == PeId{-1});
    // No critical DAG present: the dual task outranks the gpu-only one
    // (two feasible classes against one) and takes the gpu for itself.
    CHECK(place_dual(true, Criticality::normal, Duration{600000}) == 2);
}

TEST_CASE("best pe wins the gpu when nothing else holds it") {
    Fixture f;
    RuntimeState rt(f.wl);
    PlatformAccounting acct(f.p, f.wl.kinds);
    HetSchedScheduler hs(rt, acct, HetSchedConfig{});
    hs.on_ready(rt.admit(f.wl.template_id("d1"), TimeStamp{0}, Duration{600000},
                         Criticality::normal),
                TimeStamp{0});
    PassContext ctx(rt, acct, TimeStamp{0});
    hs.assignment_pass(ctx);
    REQUIRE(rt.task(0).state == TaskState::running);
    CHECK(rt.task(0).pe == 2);
}

TEST_CASE("hopeless dags are pruned before the window walk") {
    Fixture f;
    RuntimeState rt(f.wl);
    PlatformAccounting acct(f.p, f.wl.kinds);
    HetSchedScheduler hs(rt, acct, HetSchedConfig{});
    // conly needs 2000 ns best case; a 1000 ns deadline is dead on arrival.
    hs.on_ready(rt.admit(f.wl.template_id("c1"), TimeStamp{0}, Duration{1000},
                         Criticality::normal),
                TimeStamp{0});
    PassContext ctx(rt, acct, TimeStamp{0});
    hs.assignment_pass(ctx);
    CHECK(ctx.dispatched().empty());
    CHECK(rt.dag(0).state == DagState::pruned);
    CHECK(hs.ready_queue().empty());
}

TEST_CASE("rank-based pruning requires rank updates") {
    Fixture f;

    auto run = [&](bool rank_update) {
        RuntimeState rt(f.wl);
        PlatformAccounting acct(f.p, f.wl.kinds);
        HetSchedConfig cfg;
        cfg.rank_update_enabled = rank_update;
        HetSchedScheduler hs(rt, acct, cfg);
        // Critical presence arms the rank rule; the dual task fits only the
        // gpu (rank 1) but is best-case feasible, so only the rank rule can
        // drop it.
        hs.on_ready(rt.admit(f.wl.template_id("g1"), TimeStamp{0}, Duration{600000},
                             Criticality::critical),
                    TimeStamp{0});
        hs.on_ready(rt.admit(f.wl.template_id("d1"), TimeStamp{0}, Duration{2000},
                             Criticality::normal),
                    TimeStamp{0});
        PassContext ctx(rt, acct, TimeStamp{0});
        hs.assignment_pass(ctx);
        return rt.dag(1).state;
    };

    CHECK(run(true) == DagState::pruned);
    CHECK(run(false) == DagState::active);
}

TEST_CASE("scheduler name reflects policy and ranking") {
    Fixture f;
    RuntimeState rt(f.wl);
    PlatformAccounting acct(f.p, f.wl.kinds);
    HetSchedConfig cfg;
    CHECK(HetSchedScheduler(rt, acct, cfg).name() == "hetsched-msdyn-hyb");
    cfg.policy = Policy::ms_stat;
    cfg.ranking = Ranking::hom;
    CHECK(HetSchedScheduler(rt, acct, cfg).name() == "hetsched-msstat-hom");
}
