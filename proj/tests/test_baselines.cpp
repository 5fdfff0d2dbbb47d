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

#include "hetsched/baselines.hpp"

using namespace hetsched;

namespace {

struct Fixture {
    Workload wl;

    Fixture() {
        wl.kinds.add(TaskKind{"conly", {{"cpu", Duration{2000}, 500}}});
        wl.kinds.add(TaskKind{"gfast", {{"gpu", Duration{1000}, 500}}});
        wl.kinds.add(TaskKind{"gslow", {{"gpu", Duration{5000}, 500}}});
        wl.kinds.add(TaskKind{"dual", {{"cpu", Duration{4000}, 600}, {"gpu", Duration{1000}, 1800}}});
        // Mean cost 5050 but worst case 10000: flips against `ymid` (6000/6000)
        // depending on which rank basis is active.
        wl.kinds.add(TaskKind{"xwide", {{"cpu", Duration{10000}, 600}, {"gpu", Duration{100}, 900}}});
        wl.kinds.add(TaskKind{"ymid", {{"cpu", Duration{6000}, 600}}});

        wl.add_template(DagTemplate{"c1", {{0, wl.kinds.id_of("conly")}}, {}, {}});
        wl.add_template(DagTemplate{"g1", {{0, wl.kinds.id_of("gfast")}}, {}, {}});
        wl.add_template(DagTemplate{"gs", {{0, wl.kinds.id_of("gslow")}}, {}, {}});
        wl.add_template(DagTemplate{"d1", {{0, wl.kinds.id_of("dual")}}, {}, {}});
        wl.add_template(DagTemplate{"x1", {{0, wl.kinds.id_of("xwide")}}, {}, {}});
        wl.add_template(DagTemplate{"y1", {{0, wl.kinds.id_of("ymid")}}, {}, {}});
        wl.add_template(DagTemplate{
            "dchain", {{0, wl.kinds.id_of("dual")}, {1, wl.kinds.id_of("dual")}}, {{0, 1}}, {}});
    }

    Platform mixed(std::int32_t cpus) const {
        Platform p;
        p.name = "mixed";
        p.classes.push_back({"cpu", PeCategory::cpu, cpus, 1.0, 100, false, {}});
        p.classes.push_back({"gpu", PeCategory::gpu, 1, 4.0, 100, false, {}});
        p.finalize();
        return p;
    }

    Platform cpu_only() const {
        Platform p;
        p.name = "cpuonly";
        p.classes.push_back({"cpu", PeCategory::cpu, 1, 1.0, 100, false, {}});
        p.finalize();
        return p;
    }
};

} // namespace

TEST_CASE("edf dispatches by absolute deadline, criticality-blind") {
    Fixture f;
    Platform p = f.cpu_only();
    RuntimeState rt(f.wl);
    PlatformAccounting acct(p, f.wl.kinds);
    EdfScheduler edf(rt);
    CHECK(edf.name() == "2lvl-edf");

    // The critical DAG has the later deadline; EDF does not care.
    edf.on_ready(rt.admit(f.wl.template_id("c1"), TimeStamp{0}, Duration{10000},
                          Criticality::critical),
                 TimeStamp{0});
    edf.on_ready(rt.admit(f.wl.template_id("c1"), TimeStamp{0}, Duration{5000},
                          Criticality::normal),
                 TimeStamp{0});
    PassContext ctx(rt, acct, TimeStamp{0});
    edf.assignment_pass(ctx);

    CHECK(rt.task(1).state == TaskState::running);
    CHECK(rt.task(0).state == TaskState::ready);
    // The loser holds the lone cpu until its own estimated finish: the
    // winner's 2000 plus another 2000 of execution.
    REQUIRE(ctx.reservations().size() == 1);
    CHECK(ctx.reservations()[0].first == 0);
    CHECK(ctx.reservations()[0].second == TimeStamp{4000});
}

TEST_CASE("edf walks the whole queue rather than a window") {
    Fixture f;
    Platform p = f.mixed(1); // cpu=pe0, gpu=pe1
    RuntimeState rt(f.wl);
    PlatformAccounting acct(p, f.wl.kinds);
    EdfScheduler edf(rt);

    edf.on_ready(rt.admit(f.wl.template_id("c1"), TimeStamp{0}, Duration{1000},
                          Criticality::normal),
                 TimeStamp{0});
    edf.on_ready(rt.admit(f.wl.template_id("g1"), TimeStamp{0}, Duration{2000},
                          Criticality::normal),
                 TimeStamp{0});
    edf.on_ready(rt.admit(f.wl.template_id("c1"), TimeStamp{0}, Duration{3000},
                          Criticality::normal),
                 TimeStamp{0});
    PassContext ctx(rt, acct, TimeStamp{0});
    edf.assignment_pass(ctx);

    // Head takes the cpu, the gpu task behind it is not blocked by the
    // head's class, and the third waits on the cpu.
    CHECK(ctx.dispatched() == std::vector<TaskId>{0, 1});
    CHECK(rt.task(0).pe == 0);
    CHECK(rt.task(1).pe == 1);
    CHECK(rt.task(2).state == TaskState::ready);
}

TEST_CASE("ads steers critical tasks to their fastest class only") {
    Fixture f;
    Platform p = f.mixed(2); // cpu0, cpu1, gpu=pe2

    auto place = [&](Criticality c) {
        RuntimeState rt(f.wl);
        PlatformAccounting acct(p, f.wl.kinds);
        AdsScheduler ads(rt, acct);
        // Tie the gpu up for 5000 ns first.
        ads.on_ready(rt.admit(f.wl.template_id("gs"), TimeStamp{0}, Duration{600000},
                              Criticality::normal),
                     TimeStamp{0});
        PassContext warm(rt, acct, TimeStamp{0});
        ads.assignment_pass(warm);
        REQUIRE(rt.task(0).pe == 2);

        ads.on_ready(rt.admit(f.wl.template_id("d1"), TimeStamp{0}, Duration{600000}, c),
                     TimeStamp{0});
        PassContext ctx(rt, acct, TimeStamp{0});
        ads.assignment_pass(ctx);
        return rt.task(1).state == TaskState::running ? rt.task(1).pe : PeId{-1};
    };

    // Critical: gpu or nothing, so it waits out the occupancy.
    CHECK(place(Criticality::critical) == PeId{-1});
    // Normal: earliest finish wins, and that is an idle cpu here.
    CHECK(place(Criticality::normal) == 0);
}

TEST_CASE("ads rank basis toggles between mean and worst-case cost") {
    Fixture f;
    Platform p = f.cpu_only();

    auto winner = [&](bool use_mean) {
        RuntimeState rt(f.wl);
        PlatformAccounting acct(p, f.wl.kinds);
        AdsConfig cfg;
        cfg.use_mean_cost = use_mean;
        AdsScheduler ads(rt, acct, cfg);
        ads.on_ready(rt.admit(f.wl.template_id("x1"), TimeStamp{0}, Duration{600000},
                              Criticality::normal),
                     TimeStamp{0});
        ads.on_ready(rt.admit(f.wl.template_id("y1"), TimeStamp{0}, Duration{600000},
                              Criticality::normal),
                     TimeStamp{0});
        PassContext ctx(rt, acct, TimeStamp{0});
        ads.assignment_pass(ctx);
        REQUIRE(ctx.dispatched().size() == 1);
        return ctx.dispatched()[0];
    };

    // Mean cost: ymid 6000 beats xwide (10000+100)/2 = 5050.
    CHECK(winner(true) == 1);
    // Worst case: xwide 10000 beats ymid 6000.
    CHECK(winner(false) == 0);
}

TEST_CASE("ads prefers critical dags over higher ranks") {
    Fixture f;
    Platform p = f.cpu_only();
    RuntimeState rt(f.wl);
    PlatformAccounting acct(p, f.wl.kinds);
    AdsScheduler ads(rt, acct);
    CHECK(ads.name() == "ads");
    ads.on_ready(rt.admit(f.wl.template_id("y1"), TimeStamp{0}, Duration{600000},
                          Criticality::normal),
                 TimeStamp{0});
    ads.on_ready(rt.admit(f.wl.template_id("c1"), TimeStamp{0}, Duration{600000},
                          Criticality::critical),
                 TimeStamp{0});
    PassContext ctx(rt, acct, TimeStamp{0});
    ads.assignment_pass(ctx);
    // conly ranks far below ymid, but its DAG is critical.
    CHECK(ctx.dispatched() == std::vector<TaskId>{1});
}

TEST_CASE("cpath splits the queue between fastest and remaining classes") {
    Fixture f;
    Platform p = f.mixed(2);
    RuntimeState rt(f.wl);
    PlatformAccounting acct(p, f.wl.kinds);
    CpathScheduler cpath(rt, acct);
    CHECK(cpath.name() == "cpath");

    // Chain head: bottom level 8000 (top half). Lone task: 4000 (bottom half).
    cpath.on_ready(rt.admit(f.wl.template_id("dchain"), TimeStamp{0}, Duration{600000},
                            Criticality::normal),
                   TimeStamp{0});
    cpath.on_ready(rt.admit(f.wl.template_id("d1"), TimeStamp{0}, Duration{600000},
                            Criticality::normal),
                   TimeStamp{0});
    PassContext ctx(rt, acct, TimeStamp{0});
    cpath.assignment_pass(ctx);

    // Top half gets the kind's fastest class, bottom half is kept off it.
    CHECK(rt.task(0).pe == 2);
    CHECK(rt.task(2).pe == 0);
}

TEST_CASE("cpath work stealing backfills idle slower classes") {
    Fixture f;
    Platform p = f.mixed(2);

    auto place = [&](bool steal) {
        RuntimeState rt(f.wl);
        PlatformAccounting acct(p, f.wl.kinds);
        CpathConfig cfg;
        cfg.work_steal = steal;
        CpathScheduler cpath(rt, acct, cfg);
        cpath.on_ready(rt.admit(f.wl.template_id("gs"), TimeStamp{0}, Duration{600000},
                                Criticality::normal),
                       TimeStamp{0});
        PassContext warm(rt, acct, TimeStamp{0});
        cpath.assignment_pass(warm);
        REQUIRE(rt.task(0).pe == 2);

        cpath.on_ready(rt.admit(f.wl.template_id("d1"), TimeStamp{0}, Duration{600000},
                                Criticality::normal),
                       TimeStamp{0});
        PassContext ctx(rt, acct, TimeStamp{0});
        cpath.assignment_pass(ctx);
        return rt.task(1).state == TaskState::running ? rt.task(1).pe : PeId{-1};
    };

    // The lone ready task is in the top half, so it targets the busy gpu;
    // stealing hands it to cpu0 instead of letting it idle there.
    CHECK(place(true) == 0);
    CHECK(place(false) == PeId{-1});
}
