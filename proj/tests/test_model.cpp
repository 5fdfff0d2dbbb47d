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

#include <random>
#include <set>

#include "hetsched/model.hpp"

using namespace hetsched;

namespace {

KindTable demo_kinds() {
    KindTable k;
    k.add(TaskKind{"alpha",
                   {{"cpu", Duration::from_us(400), 600}, {"gpu", Duration::from_us(80), 1800}}});
    k.add(TaskKind{"beta", {{"cpu", Duration::from_us(150), 500}}});
    return k;
}

} // namespace

TEST_CASE("kind table ids and lookups") {
    KindTable k = demo_kinds();
    CHECK(k.size() == 2);
    CHECK(k.id_of("alpha") == 0);
    CHECK(k.id_of("beta") == 1);
    CHECK(k.contains("alpha"));
    CHECK_FALSE(k.contains("gamma"));
    CHECK_THROWS_AS(k.id_of("gamma"), Error);
    CHECK_THROWS_AS(k.add(TaskKind{"alpha", {{"cpu", Duration{1}, 1}}}), Error);
}

TEST_CASE("kind wcet bcet acet from the profile") {
    KindTable k = demo_kinds();
    const TaskKind &alpha = k.at(0);
    CHECK(alpha.wcet() == Duration::from_us(400));
    CHECK(alpha.bcet() == Duration::from_us(80));
    CHECK(alpha.acet() == Rational(240000)); // exact mean of 400000 and 80000
    CHECK(alpha.entry_for("gpu") != nullptr);
    CHECK(alpha.entry_for("gpu")->power_mw == 1800);
    CHECK(alpha.entry_for("npu") == nullptr);
    const TaskKind &beta = k.at(1);
    CHECK(beta.wcet() == beta.bcet());
}

TEST_CASE("dag validation catches malformed templates") {
    KindTable k = demo_kinds();
    DagTemplate t;
    t.name = "bad";
    t.nodes = {{0, 0}, {1, 0}};

    SECTION("duplicate node id") {
        t.nodes.push_back({0, 1});
        CHECK_THROWS_AS(validate_dag(t, k), Error);
    }
    SECTION("dangling edge") {
        t.edges = {{0, 7}};
        CHECK_THROWS_AS(validate_dag(t, k), Error);
    }
    SECTION("self loop") {
        t.edges = {{0, 0}};
        CHECK_THROWS_AS(validate_dag(t, k), Error);
    }
    SECTION("cycle") {
        t.nodes.push_back({2, 0});
        t.edges = {{0, 1}, {1, 2}, {2, 0}};
        try {
            validate_dag(t, k);
            FAIL("expected a cycle error");
        } catch (const Error &e) {
            CHECK(e.code() == Errc::cycle_detected);
        }
    }
    SECTION("unknown kind id") {
        t.nodes.push_back({2, 55});
        CHECK_THROWS_AS(validate_dag(t, k), Error);
    }
    SECTION("empty template") {
        DagTemplate empty;
        empty.name = "none";
        CHECK_THROWS_AS(validate_dag(empty, k), Error);
    }
}

TEST_CASE("dag structure adjacency and topological order") {
    KindTable k = demo_kinds();
    DagTemplate t;
    t.name = "diamond";
    // Ids deliberately not 0..n-1 to exercise the index mapping.
    t.nodes = {{10, 0}, {20, 0}, {30, 0}, {40, 1}};
    t.edges = {{10, 20}, {10, 30}, {20, 40}, {30, 40}};
    t.payload_bytes[{10, 30}] = 4096;
    DagStructure s = validate_dag(t, k);

    CHECK(s.size() == 4);
    const std::size_t i10 = s.index_of(10), i20 = s.index_of(20);
    const std::size_t i30 = s.index_of(30), i40 = s.index_of(40);
    CHECK(s.sources == std::vector<std::int32_t>{static_cast<std::int32_t>(i10)});
    CHECK(s.sinks == std::vector<std::int32_t>{static_cast<std::int32_t>(i40)});
    CHECK(s.parents[i40].size() == 2);
    CHECK(s.children[i10].size() == 2);
    CHECK(s.parents[i10].empty());
    CHECK(s.payload_bytes.count({static_cast<std::int32_t>(i10), static_cast<std::int32_t>(i30)}) == 1);

    // Every edge goes forward in the topological order.
    std::vector<std::size_t> pos(s.size());
    for (std::size_t i = 0; i < s.topo_order.size(); ++i)
        pos[static_cast<std::size_t>(s.topo_order[i])] = i;
    for (std::size_t n = 0; n < s.size(); ++n)
        for (std::int32_t c : s.children[n])
            CHECK(pos[n] < pos[static_cast<std::size_t>(c)]);
}

TEST_CASE("random dags always topo-sort consistently") {
    KindTable k = demo_kinds();
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 9);
        DagTemplate t;
        t.name = "rand";
        for (int i = 0; i < n; ++i)
            t.nodes.push_back({i, static_cast<KindId>(rng() % 2)});
        for (int child = 1; child < n; ++child)
            for (int parent = 0; parent < child; ++parent)
                if (rng() % 3 == 0)
                    t.edges.emplace_back(parent, child);
        DagStructure s = validate_dag(t, k);

        std::vector<std::size_t> pos(s.size());
        for (std::size_t i = 0; i < s.topo_order.size(); ++i)
            pos[static_cast<std::size_t>(s.topo_order[i])] = i;
        std::set<std::int32_t> order_set(s.topo_order.begin(), s.topo_order.end());
        CHECK(order_set.size() == s.size());
        for (std::size_t node = 0; node < s.size(); ++node) {
            for (std::int32_t c : s.children[node])
                CHECK(pos[node] < pos[static_cast<std::size_t>(c)]);
            // parents and children stay mutually consistent
            for (std::int32_t c : s.children[node]) {
                const auto &pp = s.parents[static_cast<std::size_t>(c)];
                CHECK(std::find(pp.begin(), pp.end(), static_cast<std::int32_t>(node)) != pp.end());
            }
        }
        // Sources have no parents, sinks no children.
        for (std::int32_t src : s.sources)
            CHECK(s.parents[static_cast<std::size_t>(src)].empty());
        for (std::int32_t snk : s.sinks)
            CHECK(s.children[static_cast<std::size_t>(snk)].empty());
    }
}

TEST_CASE("criticality levels") {
    CHECK(criticality_level(Criticality::normal) == 1);
    CHECK(criticality_level(Criticality::critical) == 2);
}
