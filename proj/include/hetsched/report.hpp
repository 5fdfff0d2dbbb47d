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

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "hetsched/metrics.hpp"
#include "hetsched/version.hpp"

namespace hetsched {

/// Identifies the inputs behind an output file; serialized as '#' comment
/// lines at the top of CSV reports.
struct Provenance {
    std::string config_hash;
    std::uint64_t seed{0};

    std::string header() const {
        return "# config_hash=" + config_hash + " seed=" + std::to_string(seed) + " version=" +
               kVersion + "\n";
    }
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string csv_cell(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += "\"\"";
        else
            out.push_back(c);
    }
    out += "\"";
    return out;
}

inline void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        raise(Errc::io_error, "cannot open '" + path + "' for writing");
    f << content;
    if (!f)
        raise(Errc::io_error, "write failed on '" + path + "'");
}

} // namespace detail

inline std::string qom_csv(const std::vector<QomReport> &reports, const Provenance &prov) {
    std::string out = prov.header();
    out += "scheduler,mission_ms,crit_hit_rate,pct_before_first_miss,energy_mj,dynamic_mj,"
           "static_mj,avg_utilization,dags_total,dags_met,dags_missed,dags_pruned,crit_total,"
           "crit_met\n";
    for (const QomReport &q : reports) {
        out += detail::csv_cell(q.scheduler_name);
        out += "," + detail::fmt_double(static_cast<double>(q.mission_time.ns) / 1e6);
        out += "," + detail::fmt_double(q.crit_hit_rate);
        out += "," + detail::fmt_double(q.pct_before_first_miss);
        out += "," + detail::fmt_double(q.total_energy.to_mj());
        out += "," + detail::fmt_double(q.dynamic_energy.to_mj());
        out += "," + detail::fmt_double(q.static_energy.to_mj());
        out += "," + detail::fmt_double(q.avg_utilization);
        out += "," + std::to_string(q.dags_total);
        out += "," + std::to_string(q.dags_met);
        out += "," + std::to_string(q.dags_missed);
        out += "," + std::to_string(q.dags_pruned);
        out += "," + std::to_string(q.crit_total);
        out += "," + std::to_string(q.crit_met);
        out += "\n";
    }
    return out;
}

inline std::string pe_csv(const SimResult &r, const Provenance &prov) {
    std::string out = prov.header();
    out += "pe,class,busy_ns,exec_ns,idle_ns,utilization,dynamic_mj,static_mj\n";
    for (const PeLedger &p : r.pes) {
        double u = r.horizon.ns > 0
                       ? static_cast<double>(p.busy.ns) / static_cast<double>(r.horizon.ns)
                       : 0.0;
        out += std::to_string(p.pe) + "," + detail::csv_cell(p.class_name);
        out += "," + std::to_string(p.busy.ns);
        out += "," + std::to_string(p.exec.ns);
        out += "," + std::to_string(p.idle.ns);
        out += "," + detail::fmt_double(u);
        out += "," + detail::fmt_double(p.dynamic_energy.to_mj());
        out += "," + detail::fmt_double(p.static_energy.to_mj());
        out += "\n";
    }
    return out;
}

inline std::string safe_speed_csv(const SafeSpeedResult &r, const Provenance &prov) {
    std::string out = prov.header();
    out += "multiplier,feasible,crit_hit_rate\n";
    for (const SpeedProbe &p : r.probes)
        out += detail::fmt_double(p.multiplier.to_double()) + "," +
               (p.feasible ? "1" : "0") + "," + detail::fmt_double(p.hit_rate) + "\n";
    return out;
}

inline std::string dse_csv(const DseResult &r, const Provenance &prov) {
    std::string out = prov.header();
    out += "n_det,n_tra,n_loc,n_gpu,n_cpu,pe_count,covered,feasible,crit_hit_rate,energy_mj,"
           "mission_ms,objective\n";
    for (const DseEvaluation &e : r.evaluations) {
        out += std::to_string(e.point.n_det) + "," + std::to_string(e.point.n_tra) + "," +
               std::to_string(e.point.n_loc) + "," + std::to_string(e.point.n_gpu) + "," +
               std::to_string(e.point.n_cpu);
        out += "," + std::to_string(e.pe_count);
        out += std::string(",") + (e.covered ? "1" : "0") + "," + (e.feasible ? "1" : "0");
        out += "," + detail::fmt_double(e.hit_rate);
        out += "," + detail::fmt_double(e.energy_mj);
        out += "," + detail::fmt_double(e.mission_ms);
        out += "," + detail::fmt_double(e.objective);
        out += "\n";
    }
    return out;
}

inline std::string qom_summary(const QomReport &q) {
    std::string s;
    s += "scheduler            " + q.scheduler_name + "\n";
    s += "dags                 " + std::to_string(q.dags_total) + " total, " +
         std::to_string(q.dags_met) + " met, " + std::to_string(q.dags_missed) + " missed, " +
         std::to_string(q.dags_pruned) + " pruned\n";
    s += "critical hit rate    " + detail::fmt_double(100.0 * q.crit_hit_rate) + "% (" +
         std::to_string(q.crit_met) + "/" + std::to_string(q.crit_total) + ")\n";
    s += "done before 1st miss " + detail::fmt_double(q.pct_before_first_miss) + "%\n";
    s += "mission time         " +
         detail::fmt_double(static_cast<double>(q.mission_time.ns) / 1e6) + " ms\n";
    s += "energy               " + detail::fmt_double(q.total_energy.to_mj()) + " mJ (" +
         detail::fmt_double(q.dynamic_energy.to_mj()) + " dynamic, " +
         detail::fmt_double(q.static_energy.to_mj()) + " static)\n";
    s += "avg PE utilization   " + detail::fmt_double(100.0 * q.avg_utilization) + "%\n";
    return s;
}

/// Grouped vertical bar chart, one group per label, one bar per series
/// entry. Self-contained SVG with no external references.
struct BarSeries {
    std::string name;
    std::vector<double> values;
};

inline std::string svg_grouped_bars(const std::string &title, const std::string &y_label,
                                    const std::vector<std::string> &labels,
                                    const std::vector<BarSeries> &series, int width = 960,
                                    int height = 480) {
    static const char *palette[] = {"#4878cf", "#ee854a", "#6acc65", "#d65f5f",
                                    "#956cb4", "#8c613c", "#dc7ec0", "#797979"};
    const int left = 70, right = 30, top = 50, bottom = 70;
    const int plot_w = width - left - right;
    const int plot_h = height - top - bottom;

    double vmax = 0;
    for (const BarSeries &s : series)
        for (double v : s.values)
            if (v > vmax)
                vmax = v;
    if (vmax <= 0)
        vmax = 1;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
           " " + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\" font-weight=\"bold\">" + title +
           "</text>\n";
    svg += "<text x=\"18\" y=\"" + std::to_string(top + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 18 " + std::to_string(top + plot_h / 2) + ")\">" + y_label +
           "</text>\n";

    for (int g = 0; g <= 4; ++g) {
        const double frac = g / 4.0;
        const int y = top + plot_h - static_cast<int>(frac * plot_h);
        svg += "<line x1=\"" + std::to_string(left) + "\" y1=\"" + std::to_string(y) + "\" x2=\"" +
               std::to_string(left + plot_w) + "\" y2=\"" + std::to_string(y) +
               "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + std::to_string(left - 6) + "\" y=\"" + std::to_string(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               detail::fmt_double(vmax * frac) + "</text>\n";
    }

    const std::size_t n_groups = labels.size();
    const std::size_t n_series = series.size();
    if (n_groups > 0 && n_series > 0) {
        const double group_w = static_cast<double>(plot_w) / static_cast<double>(n_groups);
        const double bar_w = group_w * 0.8 / static_cast<double>(n_series);
        for (std::size_t g = 0; g < n_groups; ++g) {
            const double gx = left + group_w * static_cast<double>(g) + group_w * 0.1;
            for (std::size_t s = 0; s < n_series; ++s) {
                const double v = g < series[s].values.size() ? series[s].values[g] : 0.0;
                const int bh = static_cast<int>(v / vmax * plot_h);
                const int x = static_cast<int>(gx + bar_w * static_cast<double>(s));
                const int y = top + plot_h - bh;
                svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                       "\" width=\"" + std::to_string(static_cast<int>(bar_w > 1 ? bar_w - 1 : 1)) +
                       "\" height=\"" + std::to_string(bh) + "\" fill=\"" +
                       palette[s % 8] + "\"/>\n";
            }
            svg += "<text x=\"" + std::to_string(static_cast<int>(left + group_w * (static_cast<double>(g) + 0.5))) +
                   "\" y=\"" + std::to_string(top + plot_h + 18) +
                   "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
                   labels[g] + "</text>\n";
        }
        for (std::size_t s = 0; s < n_series; ++s) {
            const int lx = left + static_cast<int>(s) * 150;
            const int ly = height - 24;
            svg += "<rect x=\"" + std::to_string(lx) + "\" y=\"" + std::to_string(ly - 10) +
                   "\" width=\"12\" height=\"12\" fill=\"" + palette[s % 8] + "\"/>\n";
            svg += "<text x=\"" + std::to_string(lx + 18) + "\" y=\"" + std::to_string(ly) +
                   "\" font-family=\"sans-serif\" font-size=\"12\">" + series[s].name +
                   "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

inline void write_report_file(const std::string &path, const std::string &content) {
    detail::write_text_file(path, content);
}

inline void write_event_log(const SimResult &r, const std::string &path) {
    std::string all;
    for (const std::string &line : r.event_log) {
        all += line;
        all.push_back('\n');
    }
    detail::write_text_file(path, all);
}

} // namespace hetsched
