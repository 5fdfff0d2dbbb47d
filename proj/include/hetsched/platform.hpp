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

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hetsched/error.hpp"
#include "hetsched/model.hpp"
#include "hetsched/rational.hpp"
#include "hetsched/time.hpp"

namespace hetsched {

/// One DVFS operating point. `power_scale_q32` caches round(2^32 *
/// (V / V_nominal)^2.5); the nominal point is pinned to exactly 2^32 so a
/// run that never leaves nominal frequency is bit-identical to a run with
/// DVFS disabled.
struct DvfsPoint {
    std::int64_t freq_hz{0};
    std::int64_t voltage_mv{0};
    std::int64_t power_scale_q32{std::int64_t{1} << 32};
};

enum class PeCategory : std::int8_t { cpu, gpu, accel };

inline const char *category_name(PeCategory c) {
    switch (c) {
    case PeCategory::cpu: return "cpu";
    case PeCategory::gpu: return "gpu";
    case PeCategory::accel: return "accel";
    }
    return "?";
}

inline PeCategory category_from_name(const std::string &s) {
    if (s == "cpu")
        return PeCategory::cpu;
    if (s == "gpu")
        return PeCategory::gpu;
    if (s == "accel")
        return PeCategory::accel;
    raise(Errc::config_error, "unknown PE category '" + s + "'");
}

/// A PE class: some number of identical instances. `peak_perf` is an
/// abstract ops/s figure used only for heterogeneity reporting (coefficient
/// of variation across instances), never for scheduling decisions.
struct PeClass {
    std::string name;
    PeCategory category{PeCategory::cpu};
    std::int32_t count{0};
    double peak_perf{1.0};
    std::int64_t static_power_mw{0};
    bool dvfs_enabled{false};
    std::vector<DvfsPoint> dvfs_points; // sorted by descending frequency; [0] is nominal

    std::int64_t nominal_freq_hz() const {
        return dvfs_points.empty() ? 0 : dvfs_points.front().freq_hz;
    }
};

/// Latency rule for one (source class, destination class) pair:
/// latency(bytes) = base + ceil(num/den * bytes).
struct DataMoveRule {
    std::int64_t base_ns{0};
    std::int64_t ns_per_byte_num{0};
    std::int64_t ns_per_byte_den{1};

    Duration latency(std::int64_t bytes) const {
        Int128 scaled = static_cast<Int128>(bytes) * ns_per_byte_num;
        Int128 per_byte = (scaled + ns_per_byte_den - 1) / ns_per_byte_den;
        Int128 total = per_byte + base_ns;
        if (total > Int128{INT64_MAX})
            raise(Errc::overflow, "data-move latency overflow");
        return Duration{static_cast<std::int64_t>(total)};
    }
};

/// The SoC under simulation: PE classes flattened to instances, contention
/// and DVFS knobs, and the data-movement cost table.
///
/// Default data-movement behavior (all surrogate values, overridable via
/// `move_overrides`): zero within one PE instance; zero out of a GPU source;
/// DMA at `dma_bytes_per_ns` whenever an accelerator is an endpoint;
/// `cpu_gpu_flush` for CPU to GPU; zero for the remaining CPU-to-CPU case
/// (shared memory).
class Platform {
  public:
    std::string name;
    std::vector<PeClass> classes;
    Rational contention_alpha = Rational::of(1, 10);
    Rational f_slack = Rational(0);
    std::int64_t dma_bytes_per_ns{8};
    DataMoveRule cpu_gpu_flush{10000, 1, 1};
    std::map<std::pair<std::string, std::string>, DataMoveRule> move_overrides;

    /// Flattens classes into instances and validates the description.
    /// Must be called once after the fields are populated.
    void finalize() {
        pe_class_.clear();
        class_id_.clear();
        for (std::size_t c = 0; c < classes.size(); ++c) {
            PeClass &cls = classes[c];
            if (cls.count < 0)
                raise(Errc::config_error, "PE class '" + cls.name + "' has negative count");
            if (class_id_.count(cls.name))
                raise(Errc::config_error, "PE class '" + cls.name + "' defined twice");
            class_id_[cls.name] = static_cast<PeClassId>(c);
            if (cls.dvfs_points.empty())
                cls.dvfs_points.push_back(DvfsPoint{1000000000, 1000, std::int64_t{1} << 32});
            for (std::size_t i = 1; i < cls.dvfs_points.size(); ++i)
                if (cls.dvfs_points[i].freq_hz >= cls.dvfs_points[i - 1].freq_hz)
                    raise(Errc::config_error,
                          "DVFS table for '" + cls.name + "' must be sorted by descending frequency");
            cls.dvfs_points.front().power_scale_q32 = std::int64_t{1} << 32;
            if (cls.category == PeCategory::accel)
                cls.dvfs_enabled = false; // accelerators run fixed-frequency
            for (std::int32_t i = 0; i < cls.count; ++i)
                pe_class_.push_back(static_cast<PeClassId>(c));
        }
        if (pe_class_.empty())
            raise(Errc::config_error, "platform '" + name + "' has no PE instances");
    }

    std::int32_t total_pes() const { return static_cast<std::int32_t>(pe_class_.size()); }
    PeClassId class_of(PeId pe) const { return pe_class_.at(static_cast<std::size_t>(pe)); }
    const PeClass &pe_class(PeId pe) const {
        return classes[static_cast<std::size_t>(class_of(pe))];
    }
    bool has_class(const std::string &cls) const { return class_id_.count(cls) != 0; }
    PeClassId class_id(const std::string &cls) const {
        auto it = class_id_.find(cls);
        if (it == class_id_.end())
            raise(Errc::config_error, "no PE class named '" + cls + "'");
        return it->second;
    }

    /// Analytical contention factor c(n) = 1 + alpha * n / (N - 1) for n
    /// other busy PEs out of N total.
    Rational contention_factor(std::int32_t n_other_busy) const {
        const std::int32_t n_total = total_pes();
        if (n_total <= 1 || n_other_busy <= 0)
            return Rational(1);
        return Rational(1) +
               contention_alpha * Rational::of(n_other_busy, n_total - 1);
    }

    /// Execution time of `profile_exec` (nominal, uncontended) at the given
    /// operating frequency with n_other_busy contenders; single rounding at
    /// the end.
    Duration scaled_exec(Duration profile_exec, const PeClass &cls, std::int64_t freq_hz,
                         std::int32_t n_other_busy) const {
        Rational t(profile_exec.ns);
        if (freq_hz != cls.nominal_freq_hz())
            t *= Rational::of(cls.nominal_freq_hz(), freq_hz);
        t *= contention_factor(n_other_busy);
        return Duration{t.round_to_int64()};
    }

    /// Data-movement latency for `bytes` produced on `src` and consumed on
    /// `dst`. `src` may be kInvalidPe for mission inputs (free).
    Duration data_move(PeId src, PeId dst, std::int64_t bytes) const {
        if (src == kInvalidPe || src == dst || bytes <= 0)
            return Duration::zero();
        const PeClass &s = pe_class(src);
        const PeClass &d = pe_class(dst);
        if (s.category == PeCategory::gpu)
            return Duration::zero(); // cost folded into GPU timing profiles
        auto it = move_overrides.find({s.name, d.name});
        if (it != move_overrides.end())
            return it->second.latency(bytes);
        if (s.category == PeCategory::accel || d.category == PeCategory::accel)
            return Duration{(bytes + dma_bytes_per_ns - 1) / dma_bytes_per_ns};
        if (s.category == PeCategory::cpu && d.category == PeCategory::gpu)
            return cpu_gpu_flush.latency(bytes);
        return Duration::zero(); // CPU to CPU via shared memory
    }

    /// DVFS point selection: the lowest table frequency whose stretched
    /// execution time still fits profile + f_slack * slack. The nominal
    /// point always qualifies, so the result is well defined. Classes with
    /// DVFS disabled (all accelerators) stay at nominal.
    const DvfsPoint &dvfs_select(const PeClass &cls, Duration profile_exec,
                                 Duration slack_for_task, Rational f_slack_override) const {
        const Rational &fs = f_slack_override;
        if (!cls.dvfs_enabled || fs.is_zero() || cls.dvfs_points.size() == 1)
            return cls.dvfs_points.front();
        Duration slack = max(slack_for_task, Duration::zero());
        Rational budget = Rational(profile_exec.ns) + fs * Rational(slack.ns);
        const std::int64_t f_nom = cls.nominal_freq_hz();
        // Walk from the lowest frequency up; first fit wins.
        for (std::size_t i = cls.dvfs_points.size(); i-- > 0;) {
            const DvfsPoint &p = cls.dvfs_points[i];
            Rational stretched = Rational(profile_exec.ns) * Rational::of(f_nom, p.freq_hz);
            if (stretched <= budget)
                return p;
        }
        return cls.dvfs_points.front();
    }

    const DvfsPoint &dvfs_select(const PeClass &cls, Duration profile_exec,
                                 Duration slack_for_task) const {
        return dvfs_select(cls, profile_exec, slack_for_task, f_slack);
    }

    /// Builds the three-point default DVFS table (nominal, 3/4, 1/2
    /// frequency, voltage proportional) used by the bundled presets.
    static std::vector<DvfsPoint> default_dvfs_table(std::int64_t f_nom_hz, std::int64_t v_nom_mv) {
        std::vector<DvfsPoint> pts;
        const std::int64_t fs[3][2] = {{1, 1}, {3, 4}, {1, 2}};
        for (auto &r : fs) {
            DvfsPoint p;
            p.freq_hz = f_nom_hz * r[0] / r[1];
            p.voltage_mv = v_nom_mv * r[0] / r[1];
            p.power_scale_q32 = power_scale_q32(p.voltage_mv, v_nom_mv);
            pts.push_back(p);
        }
        return pts;
    }

    /// round(2^32 * (v / v_nom)^2.5), exactly 2^32 at nominal voltage.
    static std::int64_t power_scale_q32(std::int64_t v_mv, std::int64_t v_nom_mv) {
        if (v_mv == v_nom_mv)
            return std::int64_t{1} << 32;
        double ratio = static_cast<double>(v_mv) / static_cast<double>(v_nom_mv);
        return std::llround(std::ldexp(std::pow(ratio, 2.5), 32));
    }

    /// Coefficient of variation of per-instance peak performance; the
    /// heterogeneity axis of the sensitivity experiments.
    double peak_perf_cov() const {
        double sum = 0;
        std::int64_t n = 0;
        for (const auto &cls : classes) {
            sum += cls.peak_perf * cls.count;
            n += cls.count;
        }
        if (n == 0)
            return 0;
        const double mean = sum / static_cast<double>(n);
        double var = 0;
        for (const auto &cls : classes)
            var += cls.count * (cls.peak_perf - mean) * (cls.peak_perf - mean);
        var /= static_cast<double>(n);
        return mean > 0 ? std::sqrt(var) / mean : 0;
    }

  private:
    std::vector<PeClassId> pe_class_;
    std::map<std::string, PeClassId> class_id_;
};

/// Energy in picojoules, Q32 fixed point, 128-bit. 1 mW * 1 ns = 1 pJ, so
/// milliwatt power times nanosecond durations accumulates exactly; the Q32
/// fraction carries the DVFS voltage scale.
struct EnergyQ32 {
    Int128 pj_q32{0};

    static EnergyQ32 from_mw_ns(std::int64_t power_mw, std::int64_t duration_ns,
                                std::int64_t scale_q32 = std::int64_t{1} << 32) {
        Int128 base = static_cast<Int128>(power_mw) * duration_ns;
        Int128 r;
        if (__builtin_mul_overflow(base, static_cast<Int128>(scale_q32), &r))
            raise(Errc::overflow, "energy accumulation overflow");
        return EnergyQ32{r};
    }

    EnergyQ32 operator+(EnergyQ32 o) const {
        Int128 r;
        if (__builtin_add_overflow(pj_q32, o.pj_q32, &r))
            raise(Errc::overflow, "energy accumulation overflow");
        return EnergyQ32{r};
    }
    EnergyQ32 &operator+=(EnergyQ32 o) { return *this = *this + o; }
    bool operator==(EnergyQ32 o) const { return pj_q32 == o.pj_q32; }
    bool operator!=(EnergyQ32 o) const { return pj_q32 != o.pj_q32; }
    bool operator<(EnergyQ32 o) const { return pj_q32 < o.pj_q32; }
    bool operator<=(EnergyQ32 o) const { return pj_q32 <= o.pj_q32; }

    double to_mj() const {
        return std::ldexp(static_cast<double>(pj_q32), -32) / 1e9;
    }
};

/// Per-kind view of a platform: eligible classes sorted fastest first,
/// with per-class profile timings resolved once.
struct EligibleClass {
    PeClassId class_id;
    Duration exec;
    std::int64_t power_mw;
};

class EligibilityTable {
  public:
    EligibilityTable() = default;
    EligibilityTable(const Platform &platform, const KindTable &kinds) {
        rows_.resize(kinds.size());
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            const TaskKind &kind = kinds.at(static_cast<KindId>(k));
            for (std::size_t c = 0; c < platform.classes.size(); ++c) {
                const KindProfileEntry *e = kind.entry_for(platform.classes[c].name);
                if (e != nullptr)
                    rows_[k].push_back({static_cast<PeClassId>(c), e->exec, e->power_mw});
            }
            std::sort(rows_[k].begin(), rows_[k].end(), [](const auto &a, const auto &b) {
                return a.exec != b.exec ? a.exec < b.exec : a.class_id < b.class_id;
            });
        }
    }

    /// Eligible classes for a kind, fastest first. Empty when the platform
    /// cannot run the kind at all.
    const std::vector<EligibleClass> &eligible(KindId kind) const {
        return rows_.at(static_cast<std::size_t>(kind));
    }

    const EligibleClass *entry(KindId kind, PeClassId cls) const {
        for (const auto &e : rows_.at(static_cast<std::size_t>(kind)))
            if (e.class_id == cls)
                return &e;
        return nullptr;
    }

    bool covers_all(const KindTable &kinds) const {
        for (std::size_t k = 0; k < kinds.size(); ++k)
            if (rows_[k].empty())
                return false;
        return true;
    }

  private:
    std::vector<std::vector<EligibleClass>> rows_;
};

} // namespace hetsched
