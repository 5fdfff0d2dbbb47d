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
#include <cctype>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hetsched/baselines.hpp"
#include "hetsched/metrics.hpp"
#include "hetsched/task_sched.hpp"
#include "hetsched/trace.hpp"

namespace hetsched {

using Json = nlohmann::json;

namespace detail {

inline Json load_json_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        raise(Errc::io_error, "cannot open '" + path + "'");
    try {
        return Json::parse(f);
    } catch (const Json::parse_error &e) {
        raise(Errc::parse_error, path + ": " + e.what());
    }
}

inline const Json &field(const Json &j, const char *key, const std::string &where) {
    auto it = j.find(key);
    if (it == j.end())
        raise(Errc::config_error, where + ": missing field '" + key + "'");
    return *it;
}

/// Rationals appear in config files as an integer, or as [num, den].
inline Rational rational_field(const Json &j, const std::string &where) {
    if (j.is_number_integer())
        return Rational(j.get<std::int64_t>());
    if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer())
        return Rational::of(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
    raise(Errc::config_error, where + ": expected an integer or [num, den] pair");
}

inline Duration exec_field(const Json &j, const std::string &where) {
    const bool ns = j.contains("exec_ns"), us = j.contains("exec_us"), ms = j.contains("exec_ms");
    if (static_cast<int>(ns) + static_cast<int>(us) + static_cast<int>(ms) != 1)
        raise(Errc::config_error, where + ": give exactly one of exec_ns/exec_us/exec_ms");
    if (ns)
        return Duration{j["exec_ns"].get<std::int64_t>()};
    if (us)
        return Duration::from_us(j["exec_us"].get<std::int64_t>());
    return Duration::from_ms(j["exec_ms"].get<std::int64_t>());
}

} // namespace detail

inline KindTable load_kinds(const std::string &path) {
    const Json j = detail::load_json_file(path);
    KindTable table;
    for (const Json &kj : detail::field(j, "kinds", path)) {
        TaskKind k;
        k.name = detail::field(kj, "name", path).get<std::string>();
        const std::string where = path + ": kind '" + k.name + "'";
        for (const Json &pj : detail::field(kj, "profiles", where)) {
            KindProfileEntry e;
            e.pe_class = detail::field(pj, "class", where).get<std::string>();
            e.exec = detail::exec_field(pj, where + " class '" + e.pe_class + "'");
            e.power_mw = detail::field(pj, "power_mw", where).get<std::int64_t>();
            k.profile.push_back(std::move(e));
        }
        if (k.profile.empty())
            raise(Errc::config_error, where + ": no profiles");
        if (kj.contains("input_bytes"))
            k.input_bytes = kj["input_bytes"].get<std::int64_t>();
        if (kj.contains("output_bytes"))
            k.output_bytes = kj["output_bytes"].get<std::int64_t>();
        table.add(std::move(k));
    }
    if (table.size() == 0)
        raise(Errc::config_error, path + ": no kinds defined");
    return table;
}

inline Platform load_platform(const std::string &path) {
    const Json j = detail::load_json_file(path);
    Platform p;
    p.name = detail::field(j, "name", path).get<std::string>();
    if (j.contains("contention_alpha"))
        p.contention_alpha = detail::rational_field(j["contention_alpha"], path + ": contention_alpha");
    if (j.contains("f_slack"))
        p.f_slack = detail::rational_field(j["f_slack"], path + ": f_slack");
    if (j.contains("dma_bytes_per_ns"))
        p.dma_bytes_per_ns = j["dma_bytes_per_ns"].get<std::int64_t>();
    if (j.contains("cpu_gpu_flush")) {
        const Json &fj = j["cpu_gpu_flush"];
        Rational per = detail::rational_field(detail::field(fj, "ns_per_byte", path), path);
        p.cpu_gpu_flush = DataMoveRule{detail::field(fj, "base_ns", path).get<std::int64_t>(),
                                       per.num_int64(), per.den_int64()};
    }
    for (const Json &cj : detail::field(j, "classes", path)) {
        PeClass cls;
        cls.name = detail::field(cj, "name", path).get<std::string>();
        const std::string where = path + ": class '" + cls.name + "'";
        const std::string cat = detail::field(cj, "category", where).get<std::string>();
        if (cat == "cpu")
            cls.category = PeCategory::cpu;
        else if (cat == "gpu")
            cls.category = PeCategory::gpu;
        else if (cat == "accel")
            cls.category = PeCategory::accel;
        else
            raise(Errc::config_error, where + ": category must be cpu/gpu/accel");
        cls.count = detail::field(cj, "count", where).get<std::int32_t>();
        if (cj.contains("peak_perf"))
            cls.peak_perf = cj["peak_perf"].get<double>();
        cls.static_power_mw = detail::field(cj, "static_power_mw", where).get<std::int64_t>();

        const Json &dj = detail::field(cj, "dvfs", where);
        const std::int64_t f_nom = detail::field(dj, "nominal_freq_hz", where).get<std::int64_t>();
        const std::int64_t v_nom =
            dj.contains("nominal_voltage_mv") ? dj["nominal_voltage_mv"].get<std::int64_t>() : 1000;
        cls.dvfs_enabled = dj.contains("enabled") && dj["enabled"].get<bool>();
        if (dj.contains("points")) {
            for (const Json &pt : dj["points"]) {
                DvfsPoint dp;
                dp.freq_hz = detail::field(pt, "freq_hz", where).get<std::int64_t>();
                dp.voltage_mv = detail::field(pt, "voltage_mv", where).get<std::int64_t>();
                dp.power_scale_q32 = Platform::power_scale_q32(dp.voltage_mv, v_nom);
                cls.dvfs_points.push_back(dp);
            }
            if (cls.dvfs_points.empty() || cls.dvfs_points.front().freq_hz != f_nom)
                raise(Errc::config_error, where + ": first DVFS point must be the nominal frequency");
        } else if (cls.dvfs_enabled) {
            cls.dvfs_points = Platform::default_dvfs_table(f_nom, v_nom);
        } else {
            cls.dvfs_points.push_back(DvfsPoint{f_nom, v_nom, std::int64_t{1} << 32});
        }
        p.classes.push_back(std::move(cls));
    }
    if (j.contains("move_overrides")) {
        for (const Json &mj : j["move_overrides"]) {
            const std::string src = detail::field(mj, "src", path).get<std::string>();
            const std::string dst = detail::field(mj, "dst", path).get<std::string>();
            Rational per = detail::rational_field(detail::field(mj, "ns_per_byte", path), path);
            p.move_overrides[{src, dst}] =
                DataMoveRule{detail::field(mj, "base_ns", path).get<std::int64_t>(),
                             per.num_int64(), per.den_int64()};
        }
    }
    p.finalize();
    return p;
}

inline std::vector<DagTemplate> load_catalog(const std::string &path, const KindTable &kinds) {
    const Json j = detail::load_json_file(path);
    std::vector<DagTemplate> out;
    for (const Json &tj : detail::field(j, "templates", path)) {
        DagTemplate t;
        t.name = detail::field(tj, "name", path).get<std::string>();
        const std::string where = path + ": template '" + t.name + "'";
        for (const Json &nj : detail::field(tj, "nodes", where)) {
            TemplateNode n;
            n.id = detail::field(nj, "id", where).get<NodeId>();
            n.kind = kinds.id_of(detail::field(nj, "kind", where).get<std::string>());
            t.nodes.push_back(n);
        }
        if (tj.contains("edges"))
            for (const Json &ej : tj["edges"]) {
                if (!ej.is_array() || ej.size() != 2)
                    raise(Errc::config_error, where + ": edges are [src, dst] pairs");
                t.edges.emplace_back(ej[0].get<NodeId>(), ej[1].get<NodeId>());
            }
        if (tj.contains("payloads"))
            for (const Json &pj : tj["payloads"])
                t.payload_bytes[{detail::field(pj, "src", where).get<NodeId>(),
                                 detail::field(pj, "dst", where).get<NodeId>()}] =
                    detail::field(pj, "bytes", where).get<std::int64_t>();
        out.push_back(std::move(t));
    }
    if (out.empty())
        raise(Errc::config_error, path + ": no templates defined");
    return out;
}

/// Writes a catalog with a fixed key order so identical inputs serialize
/// byte-identically.
inline void save_catalog(const std::vector<DagTemplate> &templates, const KindTable &kinds,
                         const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        raise(Errc::io_error, "cannot open '" + path + "' for writing");
    f << "{\"templates\":[\n";
    for (std::size_t i = 0; i < templates.size(); ++i) {
        const DagTemplate &t = templates[i];
        f << "{\"name\":\"" << t.name << "\",\"nodes\":[";
        for (std::size_t n = 0; n < t.nodes.size(); ++n) {
            if (n)
                f << ",";
            f << "{\"id\":" << t.nodes[n].id << ",\"kind\":\"" << kinds.at(t.nodes[n].kind).name
              << "\"}";
        }
        f << "],\"edges\":[";
        for (std::size_t e = 0; e < t.edges.size(); ++e) {
            if (e)
                f << ",";
            f << "[" << t.edges[e].first << "," << t.edges[e].second << "]";
        }
        f << "]";
        if (!t.payload_bytes.empty()) {
            f << ",\"payloads\":[";
            bool first = true;
            for (const auto &kv : t.payload_bytes) {
                if (!first)
                    f << ",";
                first = false;
                f << "{\"src\":" << kv.first.first << ",\"dst\":" << kv.first.second
                  << ",\"bytes\":" << kv.second << "}";
            }
            f << "]";
        }
        f << "}" << (i + 1 < templates.size() ? ",\n" : "\n");
    }
    f << "]}\n";
    if (!f)
        raise(Errc::io_error, "write failed on '" + path + "'");
}

inline Trace load_trace(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        raise(Errc::io_error, "cannot open '" + path + "'");
    Trace t;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error &e) {
            raise(Errc::parse_error, path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        const std::string where = path + ":" + std::to_string(line_no);
        TraceEntry e;
        e.arrival = TimeStamp{detail::field(j, "arrival_ns", where).get<std::int64_t>()};
        e.dag_type = detail::field(j, "dag_type", where).get<std::string>();
        e.criticality = detail::field(j, "criticality", where).get<int>();
        e.deadline = Duration{detail::field(j, "deadline_ns", where).get<std::int64_t>()};
        if (e.criticality != 1 && e.criticality != 2)
            raise(Errc::parse_error, where + ": criticality must be 1 or 2");
        if (!e.deadline.is_positive())
            raise(Errc::parse_error, where + ": deadline_ns must be positive");
        t.entries.push_back(std::move(e));
    }
    return t;
}

/// Builds a factory from a scheduler name. Recognized names: "2lvl-edf"
/// (alias "edf"), "ads", "cpath", and "hetsched[-<policy>[-<ranking>]]"
/// with policy msstat/msdyn and ranking hom/het/hyb; omitted parts keep the
/// values already in `hs`.
inline SchedulerFactory scheduler_factory(const std::string &name, HetSchedConfig hs = {},
                                          AdsConfig ads = {}, CpathConfig cpath = {}) {
    std::string n;
    for (char c : name)
        n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    std::replace(n.begin(), n.end(), '_', '-');

    if (n == "2lvl-edf" || n == "edf" || n == "edf-2lvl")
        return [](RuntimeState &rt, PlatformAccounting &) {
            return std::make_unique<EdfScheduler>(rt);
        };
    if (n == "ads")
        return [ads](RuntimeState &rt, PlatformAccounting &acct) {
            return std::make_unique<AdsScheduler>(rt, acct, ads);
        };
    if (n == "cpath")
        return [cpath](RuntimeState &rt, PlatformAccounting &acct) {
            return std::make_unique<CpathScheduler>(rt, acct, cpath);
        };
    if (n.rfind("hetsched", 0) == 0) {
        std::string rest = n.substr(8);
        std::vector<std::string> parts;
        std::string cur;
        for (char c : rest) {
            if (c == '-') {
                if (!cur.empty())
                    parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty())
            parts.push_back(cur);
        for (const std::string &p : parts) {
            if (p == "msstat" || p == "ms-stat" || p == "stat")
                hs.policy = Policy::ms_stat;
            else if (p == "msdyn" || p == "dyn")
                hs.policy = Policy::ms_dyn;
            else if (p == "hom")
                hs.ranking = Ranking::hom;
            else if (p == "het")
                hs.ranking = Ranking::het;
            else if (p == "hyb")
                hs.ranking = Ranking::hyb;
            else
                raise(Errc::config_error, "unknown scheduler variant token '" + p + "'");
        }
        hs.validate();
        return [hs](RuntimeState &rt, PlatformAccounting &acct) {
            return std::make_unique<HetSchedScheduler>(rt, acct, hs);
        };
    }
    raise(Errc::config_error, "unknown scheduler '" + name + "'");
}

/// Workload-generation settings from a run config.
struct GenSpec {
    AppId app{AppId::synthetic};
    Scenario scenario{Scenario::urban};
    std::int64_t n_dags{1000};
    Duration mean_interarrival{Duration::from_us(1000)};
    ArrivalDist distribution{ArrivalDist::exponential};
    std::uint64_t seed{1};
    SyntheticConfig synth;
};

/// One experiment description: where the inputs live, which scheduler runs,
/// and the knobs for the search subcommands. Paths are resolved against the
/// config file's own directory.
struct RunSpec {
    std::string kinds_path;
    std::string platform_path;
    std::string catalog_path; // optional; required for app workloads
    std::string trace_path;   // optional; wins over generation when set
    bool has_gen{false};
    GenSpec gen;
    std::string scheduler{"hetsched-msdyn-hyb"};
    HetSchedConfig hetsched;
    AdsConfig ads;
    CpathConfig cpath;
    Duration sched_overhead;
    Rational speed{1};
    SafeSpeedOptions safe_speed;
    bool has_dse{false};
    DseAxes dse;
    DseClassMap dse_classes;
};

namespace detail {

inline std::string dir_of(const std::string &path) {
    const std::size_t cut = path.find_last_of('/');
    return cut == std::string::npos ? std::string() : path.substr(0, cut + 1);
}

inline std::string resolve_path(const std::string &base_dir, const std::string &p) {
    if (p.empty() || p.front() == '/')
        return p;
    return base_dir + p;
}

inline std::vector<std::int32_t> int_list(const Json &j, const std::string &where) {
    std::vector<std::int32_t> out;
    if (!j.is_array())
        raise(Errc::config_error, where + ": expected a list of counts");
    for (const Json &v : j)
        out.push_back(v.get<std::int32_t>());
    return out;
}

} // namespace detail

inline RunSpec load_run_spec(const std::string &path) {
    const Json j = detail::load_json_file(path);
    const std::string dir = detail::dir_of(path);
    RunSpec spec;
    spec.kinds_path = detail::resolve_path(dir, detail::field(j, "kinds", path).get<std::string>());
    spec.platform_path =
        detail::resolve_path(dir, detail::field(j, "platform", path).get<std::string>());
    if (j.contains("catalog"))
        spec.catalog_path = detail::resolve_path(dir, j["catalog"].get<std::string>());
    if (j.contains("trace"))
        spec.trace_path = detail::resolve_path(dir, j["trace"].get<std::string>());
    if (j.contains("generate")) {
        const Json &g = j["generate"];
        spec.has_gen = true;
        if (g.contains("app"))
            spec.gen.app = app_from_name(g["app"].get<std::string>());
        if (g.contains("scenario"))
            spec.gen.scenario = scenario_from_name(g["scenario"].get<std::string>());
        if (g.contains("n_dags"))
            spec.gen.n_dags = g["n_dags"].get<std::int64_t>();
        if (g.contains("mean_interarrival_us"))
            spec.gen.mean_interarrival = Duration::from_us(g["mean_interarrival_us"].get<std::int64_t>());
        if (g.contains("mean_interarrival_ms"))
            spec.gen.mean_interarrival = Duration::from_ms(g["mean_interarrival_ms"].get<std::int64_t>());
        if (g.contains("distribution")) {
            const std::string d = g["distribution"].get<std::string>();
            if (d == "exponential")
                spec.gen.distribution = ArrivalDist::exponential;
            else if (d == "periodic")
                spec.gen.distribution = ArrivalDist::periodic;
            else
                raise(Errc::config_error, path + ": distribution must be exponential or periodic");
        }
        if (g.contains("seed"))
            spec.gen.seed = g["seed"].get<std::uint64_t>();
        if (g.contains("pool_size"))
            spec.gen.synth.pool_size = g["pool_size"].get<std::int32_t>();
        if (g.contains("min_nodes"))
            spec.gen.synth.min_nodes = g["min_nodes"].get<std::int32_t>();
        if (g.contains("max_nodes"))
            spec.gen.synth.max_nodes = g["max_nodes"].get<std::int32_t>();
    }
    if (j.contains("scheduler"))
        spec.scheduler = j["scheduler"].get<std::string>();
    if (j.contains("sched_overhead_ns"))
        spec.sched_overhead = Duration{j["sched_overhead_ns"].get<std::int64_t>()};
    if (j.contains("speed"))
        spec.speed = detail::rational_field(j["speed"], path + ": speed");
    if (j.contains("hetsched")) {
        const Json &h = j["hetsched"];
        if (h.contains("window_w"))
            spec.hetsched.window_w = h["window_w"].get<std::int32_t>();
        if (h.contains("pruning"))
            spec.hetsched.pruning_enabled = h["pruning"].get<bool>();
        if (h.contains("rank_update"))
            spec.hetsched.rank_update_enabled = h["rank_update"].get<bool>();
        if (h.contains("carveout"))
            spec.hetsched.carveout_enabled = h["carveout"].get<bool>();
        if (h.contains("t_crit_ms") && h["t_crit_ms"].get<std::int64_t>() > 0)
            spec.hetsched.t_crit = Duration::from_ms(h["t_crit_ms"].get<std::int64_t>());
        if (h.contains("t_crit_ns") && h["t_crit_ns"].get<std::int64_t>() > 0)
            spec.hetsched.t_crit = Duration{h["t_crit_ns"].get<std::int64_t>()};
        if (h.contains("promote_all"))
            spec.hetsched.promote_all = h["promote_all"].get<bool>();
    }
    if (j.contains("ads") && j["ads"].contains("use_mean_cost"))
        spec.ads.use_mean_cost = j["ads"]["use_mean_cost"].get<bool>();
    if (j.contains("cpath") && j["cpath"].contains("work_steal"))
        spec.cpath.work_steal = j["cpath"]["work_steal"].get<bool>();
    if (j.contains("safe_speed")) {
        const Json &s = j["safe_speed"];
        if (s.contains("lo"))
            spec.safe_speed.lo = detail::rational_field(s["lo"], path + ": safe_speed.lo");
        if (s.contains("hi"))
            spec.safe_speed.hi = detail::rational_field(s["hi"], path + ": safe_speed.hi");
        if (s.contains("tolerance"))
            spec.safe_speed.tolerance =
                detail::rational_field(s["tolerance"], path + ": safe_speed.tolerance");
    }
    if (j.contains("dse")) {
        const Json &d = j["dse"];
        spec.has_dse = true;
        spec.dse.det = detail::int_list(detail::field(d, "det", path), path + ": dse.det");
        spec.dse.tra = detail::int_list(detail::field(d, "tra", path), path + ": dse.tra");
        spec.dse.loc = detail::int_list(detail::field(d, "loc", path), path + ": dse.loc");
        spec.dse.gpu = detail::int_list(detail::field(d, "gpu", path), path + ": dse.gpu");
        spec.dse.cpu = detail::int_list(detail::field(d, "cpu", path), path + ": dse.cpu");
        if (d.contains("classes")) {
            const Json &c = d["classes"];
            if (c.contains("det"))
                spec.dse_classes.det = c["det"].get<std::string>();
            if (c.contains("tra"))
                spec.dse_classes.tra = c["tra"].get<std::string>();
            if (c.contains("loc"))
                spec.dse_classes.loc = c["loc"].get<std::string>();
            if (c.contains("gpu"))
                spec.dse_classes.gpu = c["gpu"].get<std::string>();
            if (c.contains("cpu"))
                spec.dse_classes.cpu = c["cpu"].get<std::string>();
        }
    }
    return spec;
}

inline std::uint64_t fnv1a64(const std::string &s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char *digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

/// Provenance digest of the inputs that shaped a run.
inline std::string config_hash(const std::vector<std::string> &parts) {
    std::string all;
    for (const std::string &p : parts) {
        all += p;
        all.push_back('\x1f');
    }
    return hex64(fnv1a64(all));
}

} // namespace hetsched
