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

// Minimal programmatic use of the library: two task kinds, a CPU+GPU
// platform, one diamond DAG template, a three-arrival trace, one run.

#include <iostream>

#include "hetsched/hetsched.hpp"

using namespace hetsched;

int main() {
    Workload w;
    KindId filt = w.kinds.add(TaskKind{
        "filter",
        {{"cpu", Duration::from_us(400), 600}, {"gpu", Duration::from_us(80), 1800}}});
    KindId fuse = w.kinds.add(TaskKind{"fuse", {{"cpu", Duration::from_us(150), 500}}});

    DagTemplate t;
    t.name = "diamond";
    t.nodes = {{0, filt}, {1, filt}, {2, filt}, {3, fuse}};
    t.edges = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    TemplateId tid = w.add_template(t);
    std::cout << "critical path: " << w.analysis(tid).critical_path_wcet.ns << " ns\n";

    Platform p;
    p.name = "demo";
    p.classes.push_back({"cpu", PeCategory::cpu, 2, 1.0, 150, false,
                         {{2000000000, 1000, std::int64_t{1} << 32}}});
    p.classes.push_back({"gpu", PeCategory::gpu, 1, 4.0, 400, false,
                         {{1000000000, 1000, std::int64_t{1} << 32}}});
    p.finalize();

    std::vector<ResolvedEntry> trace;
    for (int i = 0; i < 3; ++i)
        trace.push_back({TimeStamp{i * 500000}, tid,
                         i == 1 ? Criticality::critical : Criticality::normal,
                         Duration::from_ms(2)});

    auto factory = [](RuntimeState &rt, PlatformAccounting &acct) {
        return std::make_unique<HetSchedScheduler>(rt, acct, HetSchedConfig{});
    };
    SimResult r = run(w, p, trace, factory);
    std::cout << qom_summary(qom_report(r));
    for (const std::string &line : r.event_log)
        std::cout << line << "\n";
    return 0;
}
