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

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "hetsched/hetsched.hpp"

namespace hs = hetsched;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string scheduler; // override
    std::string policy;    // msstat / msdyn
    std::string ranking;   // hom / het / hyb
    bool no_pruning{false};
    bool no_rank_update{false};
    bool no_carveout{false};
    bool promote_all{false};
    std::int32_t window_w{-1};
    std::int64_t t_crit_ms{-1};
    std::string fslack;
    std::string speed;
    std::int64_t seed{-1};
    std::int64_t overhead_ns{-1};
    std::string out_dir;
    int jobs{1};
};

void add_common(CLI::App *cmd, CommonFlags &f) {
    cmd->add_option("--config", f.config_path, "run configuration file")->required();
    cmd->add_option("--scheduler", f.scheduler, "scheduler name override");
    cmd->add_option("--policy", f.policy, "sub-deadline policy: msstat or msdyn");
    cmd->add_option("--ranking", f.ranking, "ranking mode: hom, het or hyb");
    cmd->add_flag("--no-pruning", f.no_pruning, "disable DAG pruning");
    cmd->add_flag("--no-rank-update", f.no_rank_update, "disable per-pass rank refresh");
    cmd->add_flag("--no-carveout", f.no_carveout, "disable the non-critical PE carve-out");
    cmd->add_flag("--promote-all", f.promote_all, "promote every starved normal DAG at once");
    cmd->add_option("--window", f.window_w, "queue positions examined per pass");
    cmd->add_option("--t-crit-ms", f.t_crit_ms, "promotion window in ms (0 disables)");
    cmd->add_option("--fslack", f.fslack, "DVFS slack fraction, e.g. 1/2");
    cmd->add_option("--speed", f.speed, "arrival speed multiplier, e.g. 3/2");
    cmd->add_option("--seed", f.seed, "workload generation seed override");
    cmd->add_option("--overhead-ns", f.overhead_ns, "scheduling overhead per dispatch in ns");
    cmd->add_option("--out-dir", f.out_dir, "directory for CSV/SVG/event outputs");
    cmd->add_option("--jobs", f.jobs, "parallel workers for sweep and dse");
}

hs::Rational parse_rational(const std::string &s, const char *what) {
    const std::size_t slash = s.find('/');
    try {
        if (slash == std::string::npos)
            return hs::Rational(std::stoll(s));
        return hs::Rational::of(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception &) {
        hs::raise(hs::Errc::config_error, std::string(what) + ": cannot parse '" + s + "'");
    }
}

/// Config file merged with command-line overrides.
hs::RunSpec effective_spec(const CommonFlags &f) {
    hs::RunSpec spec = hs::load_run_spec(f.config_path);
    if (!f.scheduler.empty())
        spec.scheduler = f.scheduler;
    if (!f.policy.empty() || !f.ranking.empty()) {
        if (spec.scheduler.rfind("hetsched", 0) != 0)
            spec.scheduler = "hetsched";
        // Rebuild the canonical name from existing tokens plus overrides.
        hs::HetSchedConfig probe = spec.hetsched;
        hs::scheduler_factory(spec.scheduler, probe); // validates current tokens
        std::string policy = f.policy;
        std::string ranking = f.ranking;
        std::string rest = spec.scheduler.substr(8);
        std::stringstream ss(rest);
        std::string tok;
        while (std::getline(ss, tok, '-')) {
            if (tok == "msstat" || tok == "msdyn") {
                if (policy.empty())
                    policy = tok;
            } else if (tok == "hom" || tok == "het" || tok == "hyb") {
                if (ranking.empty())
                    ranking = tok;
            }
        }
        if (policy.empty())
            policy = spec.hetsched.policy == hs::Policy::ms_stat ? "msstat" : "msdyn";
        if (ranking.empty())
            ranking = hs::ranking_name(spec.hetsched.ranking);
        spec.scheduler = "hetsched-" + policy + "-" + ranking;
    }
    if (f.no_pruning)
        spec.hetsched.pruning_enabled = false;
    if (f.no_rank_update)
        spec.hetsched.rank_update_enabled = false;
    if (f.no_carveout)
        spec.hetsched.carveout_enabled = false;
    if (f.promote_all)
        spec.hetsched.promote_all = true;
    if (f.window_w > 0)
        spec.hetsched.window_w = f.window_w;
    if (f.t_crit_ms == 0)
        spec.hetsched.t_crit.reset();
    else if (f.t_crit_ms > 0)
        spec.hetsched.t_crit = hs::Duration::from_ms(f.t_crit_ms);
    if (f.seed >= 0)
        spec.gen.seed = static_cast<std::uint64_t>(f.seed);
    if (f.overhead_ns >= 0)
        spec.sched_overhead = hs::Duration{f.overhead_ns};
    if (!f.speed.empty())
        spec.speed = parse_rational(f.speed, "--speed");
    return spec;
}

struct Materialized {
    hs::Workload workload;
    hs::Platform platform;
    hs::Trace trace;
    std::vector<hs::ResolvedEntry> resolved;
    std::string hash;
    std::uint64_t seed{0};
};

std::string slurp(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        return {};
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Materialized materialize(const hs::RunSpec &spec, const CommonFlags &f) {
    Materialized m;
    m.seed = spec.gen.seed;
    m.workload.kinds = hs::load_kinds(spec.kinds_path);
    m.platform = hs::load_platform(spec.platform_path);
    if (!f.fslack.empty())
        m.platform.f_slack = parse_rational(f.fslack, "--fslack");

    std::vector<hs::DagTemplate> templates;
    if (!spec.trace_path.empty()) {
        if (spec.catalog_path.empty())
            hs::raise(hs::Errc::config_error,
                      "a pre-generated trace needs a catalog to resolve template names");
        templates = hs::load_catalog(spec.catalog_path, m.workload.kinds);
        m.trace = hs::load_trace(spec.trace_path);
    } else if (spec.has_gen) {
        hs::ScenarioSpec sc;
        sc.scenario = spec.gen.scenario;
        sc.n_dags = spec.gen.n_dags;
        sc.mean_interarrival = spec.gen.mean_interarrival;
        sc.distribution = spec.gen.distribution;
        hs::GeneratedTrace g;
        if (spec.gen.app == hs::AppId::synthetic) {
            g = hs::gen_synthetic(m.workload.kinds, sc, spec.gen.seed, spec.gen.synth);
        } else {
            if (spec.catalog_path.empty())
                hs::raise(hs::Errc::config_error,
                          "application workloads need a catalog file");
            auto catalog = hs::load_catalog(spec.catalog_path, m.workload.kinds);
            g = hs::gen_app_trace(spec.gen.app, m.workload.kinds, catalog, sc, spec.gen.seed);
        }
        templates = std::move(g.templates);
        m.trace = std::move(g.trace);
    } else {
        hs::raise(hs::Errc::config_error, "config needs either a trace or a generate block");
    }
    if (!(spec.speed == hs::Rational(1)))
        m.trace = hs::scale_trace(m.trace, spec.speed);
    for (const hs::DagTemplate &t : templates)
        m.workload.add_template(t);
    m.resolved = hs::resolve_trace(m.trace, m.workload);
    m.hash = hs::config_hash({slurp(f.config_path), slurp(spec.kinds_path),
                              slurp(spec.platform_path), slurp(spec.catalog_path), spec.scheduler,
                              std::to_string(spec.gen.seed), spec.speed.to_string()});
    return m;
}

void ensure_dir(const std::string &dir) {
    if (!dir.empty())
        std::filesystem::create_directories(dir);
}

hs::SimResult run_one(const Materialized &m, const hs::RunSpec &spec, const std::string &sched,
                      bool keep_events) {
    hs::SimOptions opt;
    opt.sched_overhead = spec.sched_overhead;
    opt.keep_event_log = keep_events;
    auto factory = hs::scheduler_factory(sched, spec.hetsched, spec.ads, spec.cpath);
    return hs::run(m.workload, m.platform, m.resolved, factory, opt);
}

int cmd_run(const CommonFlags &f) {
    const hs::RunSpec spec = effective_spec(f);
    const Materialized m = materialize(spec, f);
    const bool keep_events = !f.out_dir.empty();
    hs::SimResult r = run_one(m, spec, spec.scheduler, keep_events);
    hs::QomReport q = hs::qom_report(r);
    std::cout << hs::qom_summary(q);
    if (!f.out_dir.empty()) {
        ensure_dir(f.out_dir);
        hs::Provenance prov{m.hash, m.seed};
        hs::write_report_file(f.out_dir + "/qom.csv", hs::qom_csv({q}, prov));
        hs::write_report_file(f.out_dir + "/pe.csv", hs::pe_csv(r, prov));
        hs::write_report_file(f.out_dir + "/summary.txt", hs::qom_summary(q));
        hs::write_event_log(r, f.out_dir + "/events.jsonl");
        std::cout << "wrote qom.csv, pe.csv, summary.txt, events.jsonl to " << f.out_dir << "\n";
    }
    return 0;
}

std::vector<std::string> split_csv(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty())
            out.push_back(tok);
    return out;
}

int sweep_impl(const CommonFlags &f, const std::vector<std::string> &schedulers) {
    const hs::RunSpec spec = effective_spec(f);
    const Materialized m = materialize(spec, f);

    std::vector<hs::QomReport> reports(schedulers.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < schedulers.size(); i = next.fetch_add(1))
            reports[i] = hs::qom_report(run_one(m, spec, schedulers[i], false));
    };
    const int n_workers =
        std::max(1, std::min<int>(f.jobs, static_cast<int>(schedulers.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_workers; ++t)
            pool.emplace_back(worker);
        for (std::thread &t : pool)
            t.join();
    }

    std::printf("%-24s %10s %8s %12s %12s\n", "scheduler", "mission_ms", "hit%", "pct<miss",
                "energy_mJ");
    for (const hs::QomReport &q : reports)
        std::printf("%-24s %10.1f %8.2f %12.1f %12.1f\n", q.scheduler_name.c_str(),
                    static_cast<double>(q.mission_time.ns) / 1e6, 100.0 * q.crit_hit_rate,
                    q.pct_before_first_miss, q.total_energy.to_mj());

    if (!f.out_dir.empty()) {
        ensure_dir(f.out_dir);
        hs::Provenance prov{m.hash, m.seed};
        hs::write_report_file(f.out_dir + "/qom.csv", hs::qom_csv(reports, prov));
        std::vector<std::string> labels;
        hs::BarSeries mission{"mission time (ms)", {}};
        hs::BarSeries energy{"energy (mJ)", {}};
        hs::BarSeries hit{"critical hit rate (%)", {}};
        for (const hs::QomReport &q : reports) {
            labels.push_back(q.scheduler_name);
            mission.values.push_back(static_cast<double>(q.mission_time.ns) / 1e6);
            energy.values.push_back(q.total_energy.to_mj());
            hit.values.push_back(100.0 * q.crit_hit_rate);
        }
        hs::write_report_file(f.out_dir + "/mission.svg",
                              hs::svg_grouped_bars("Mission time", "ms", labels, {mission}));
        hs::write_report_file(f.out_dir + "/energy.svg",
                              hs::svg_grouped_bars("Total energy", "mJ", labels, {energy}));
        hs::write_report_file(f.out_dir + "/hit_rate.svg",
                              hs::svg_grouped_bars("Critical deadline hit rate", "%", labels, {hit}));
        std::cout << "wrote qom.csv, mission.svg, energy.svg, hit_rate.svg to " << f.out_dir
                  << "\n";
    }
    return 0;
}

int cmd_safe_speed(const CommonFlags &f) {
    const hs::RunSpec spec = effective_spec(f);
    const Materialized m = materialize(spec, f);
    hs::SimOptions opt;
    opt.sched_overhead = spec.sched_overhead;
    auto factory = hs::scheduler_factory(spec.scheduler, spec.hetsched, spec.ads, spec.cpath);
    hs::SafeSpeedResult r =
        hs::max_safe_speed(m.workload, m.platform, m.trace, factory, opt, spec.safe_speed);
    std::cout << "max safe speed multiplier: " << r.speed.to_string() << " (~"
              << r.speed.to_double() << ")" << (r.saturated ? " [saturated]" : "") << "\n";
    std::cout << "probes: " << r.probes.size() << "\n";
    for (const std::string &w : r.warnings)
        std::cout << "warning: " << w << "\n";
    if (!f.out_dir.empty()) {
        ensure_dir(f.out_dir);
        hs::Provenance prov{m.hash, m.seed};
        hs::write_report_file(f.out_dir + "/safe_speed.csv", hs::safe_speed_csv(r, prov));
        std::cout << "wrote safe_speed.csv to " << f.out_dir << "\n";
    }
    return 0;
}

int cmd_dse(const CommonFlags &f) {
    const hs::RunSpec spec = effective_spec(f);
    if (!spec.has_dse)
        hs::raise(hs::Errc::config_error, "config has no dse block");
    const Materialized m = materialize(spec, f);
    hs::SimOptions opt;
    opt.sched_overhead = spec.sched_overhead;
    auto factory = hs::scheduler_factory(spec.scheduler, spec.hetsched, spec.ads, spec.cpath);
    auto build = hs::grid_platform_builder(m.platform, spec.dse_classes);
    hs::DseResult r =
        hs::dse_search(m.workload, m.trace, spec.dse, build, factory, opt, f.jobs);
    std::cout << "evaluated " << r.evaluated << " configurations, " << r.feasible_count
              << " safe\n";
    std::cout << "best (det,tra,loc,gpu,cpu) = " << r.best.to_string()
              << "  objective = " << r.best_objective << " mJ*ms\n";
    std::cout << hs::qom_summary(r.best_report);
    std::cout << "Pareto frontier (" << r.frontier.size() << " points):\n";
    for (const hs::DseEvaluation &e : r.frontier)
        std::printf("  %-18s energy %10.1f mJ  mission %10.1f ms  PEs %3d\n",
                    e.point.to_string().c_str(), e.energy_mj, e.mission_ms, e.pe_count);
    if (!f.out_dir.empty()) {
        ensure_dir(f.out_dir);
        hs::Provenance prov{m.hash, m.seed};
        hs::write_report_file(f.out_dir + "/dse.csv", hs::dse_csv(r, prov));
        std::cout << "wrote dse.csv to " << f.out_dir << "\n";
    }
    return 0;
}

int cmd_gen_trace(const CommonFlags &f, const std::string &out_path,
                  const std::string &catalog_out) {
    const hs::RunSpec spec = effective_spec(f);
    if (!spec.has_gen)
        hs::raise(hs::Errc::config_error, "config has no generate block");
    hs::KindTable kinds = hs::load_kinds(spec.kinds_path);
    hs::ScenarioSpec sc;
    sc.scenario = spec.gen.scenario;
    sc.n_dags = spec.gen.n_dags;
    sc.mean_interarrival = spec.gen.mean_interarrival;
    sc.distribution = spec.gen.distribution;
    hs::GeneratedTrace g;
    if (spec.gen.app == hs::AppId::synthetic) {
        g = hs::gen_synthetic(kinds, sc, spec.gen.seed, spec.gen.synth);
        if (catalog_out.empty())
            hs::raise(hs::Errc::config_error,
                      "synthetic traces need --catalog-out to stay resolvable");
    } else {
        if (spec.catalog_path.empty())
            hs::raise(hs::Errc::config_error, "application workloads need a catalog file");
        auto catalog = hs::load_catalog(spec.catalog_path, kinds);
        g = hs::gen_app_trace(spec.gen.app, kinds, catalog, sc, spec.gen.seed);
    }
    hs::save_trace(g.trace, out_path);
    std::cout << "wrote " << g.trace.entries.size() << " arrivals to " << out_path << "\n";
    if (!catalog_out.empty()) {
        hs::save_catalog(g.templates, kinds, catalog_out);
        std::cout << "wrote " << g.templates.size() << " templates to " << catalog_out << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"trace-driven scheduling simulator for heterogeneous SoCs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", hs::kVersion);

    CommonFlags run_f, sweep_f, speed_f, dse_f, gen_f, report_f;
    std::string sweep_list = "hetsched-msdyn-hyb,2lvl-edf,ads,cpath";
    std::string gen_out, gen_catalog_out;

    CLI::App *run_cmd = app.add_subcommand("run", "simulate one scheduler on one workload");
    add_common(run_cmd, run_f);
    CLI::App *sweep_cmd = app.add_subcommand("sweep", "compare schedulers on one workload");
    add_common(sweep_cmd, sweep_f);
    sweep_cmd->add_option("--schedulers", sweep_list, "comma-separated scheduler names");
    CLI::App *speed_cmd =
        app.add_subcommand("safe-speed", "bisect the maximum safe arrival-speed multiplier");
    add_common(speed_cmd, speed_f);
    CLI::App *dse_cmd = app.add_subcommand("dse", "search the platform configuration grid");
    add_common(dse_cmd, dse_f);
    CLI::App *gen_cmd = app.add_subcommand("gen-trace", "generate a trace file from a config");
    add_common(gen_cmd, gen_f);
    gen_cmd->add_option("--out", gen_out, "trace output path")->required();
    gen_cmd->add_option("--catalog-out", gen_catalog_out, "template catalog output path");
    CLI::App *report_cmd =
        app.add_subcommand("report", "run the standard scheduler comparison with charts");
    add_common(report_cmd, report_f);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return cmd_run(run_f);
        if (sweep_cmd->parsed())
            return sweep_impl(sweep_f, split_csv(sweep_list));
        if (speed_cmd->parsed())
            return cmd_safe_speed(speed_f);
        if (dse_cmd->parsed())
            return cmd_dse(dse_f);
        if (gen_cmd->parsed())
            return cmd_gen_trace(gen_f, gen_out, gen_catalog_out);
        if (report_cmd->parsed())
            return sweep_impl(report_f, split_csv(sweep_list));
    } catch (const hs::Error &e) {
        std::cerr << "error [" << hs::errc_name(e.code()) << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
