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

#include <cstdint>
#include <string>

#include "hetsched/error.hpp"
#include "hetsched/rational.hpp"

namespace hetsched {

namespace detail {

inline std::int64_t checked_add_i64(std::int64_t a, std::int64_t b, const char *what) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        raise(Errc::overflow, what);
    return r;
}

inline std::int64_t checked_sub_i64(std::int64_t a, std::int64_t b, const char *what) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        raise(Errc::overflow, what);
    return r;
}

inline std::int64_t checked_mul_i64(std::int64_t a, std::int64_t b, const char *what) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        raise(Errc::overflow, what);
    return r;
}

} // namespace detail

/// Signed span of time in integer nanoseconds. All simulation arithmetic is
/// integral; negative values occur only as slack. Arithmetic is
/// overflow-checked and throws Errc::overflow.
struct Duration {
    std::int64_t ns{0};

    constexpr Duration() = default;
    constexpr explicit Duration(std::int64_t nanoseconds) : ns(nanoseconds) {}

    static constexpr Duration zero() { return Duration{0}; }
    static Duration from_us(std::int64_t us) { return Duration{detail::checked_mul_i64(us, 1000, "us to ns")}; }
    static Duration from_ms(std::int64_t ms) { return Duration{detail::checked_mul_i64(ms, 1000000, "ms to ns")}; }
    static Duration from_s(std::int64_t s) { return Duration{detail::checked_mul_i64(s, 1000000000, "s to ns")}; }

    bool is_negative() const { return ns < 0; }
    bool is_positive() const { return ns > 0; }
    double to_us() const { return static_cast<double>(ns) / 1e3; }
    double to_ms() const { return static_cast<double>(ns) / 1e6; }

    Duration operator+(Duration o) const { return Duration{detail::checked_add_i64(ns, o.ns, "duration add")}; }
    Duration operator-(Duration o) const { return Duration{detail::checked_sub_i64(ns, o.ns, "duration sub")}; }
    Duration operator-() const { return Duration{detail::checked_sub_i64(0, ns, "duration negate")}; }
    Duration operator*(std::int64_t k) const { return Duration{detail::checked_mul_i64(ns, k, "duration scale")}; }
    Duration &operator+=(Duration o) { return *this = *this + o; }
    Duration &operator-=(Duration o) { return *this = *this - o; }

    bool operator==(Duration o) const { return ns == o.ns; }
    bool operator!=(Duration o) const { return ns != o.ns; }
    bool operator<(Duration o) const { return ns < o.ns; }
    bool operator<=(Duration o) const { return ns <= o.ns; }
    bool operator>(Duration o) const { return ns > o.ns; }
    bool operator>=(Duration o) const { return ns >= o.ns; }

    Rational to_rational() const { return Rational(ns); }
};

/// Absolute simulation time in integer nanoseconds since mission start.
struct TimeStamp {
    std::int64_t ns{0};

    constexpr TimeStamp() = default;
    constexpr explicit TimeStamp(std::int64_t nanoseconds) : ns(nanoseconds) {}

    static constexpr TimeStamp zero() { return TimeStamp{0}; }

    TimeStamp operator+(Duration d) const { return TimeStamp{detail::checked_add_i64(ns, d.ns, "time advance")}; }
    TimeStamp operator-(Duration d) const { return TimeStamp{detail::checked_sub_i64(ns, d.ns, "time rewind")}; }
    Duration operator-(TimeStamp o) const { return Duration{detail::checked_sub_i64(ns, o.ns, "time diff")}; }
    TimeStamp &operator+=(Duration d) { return *this = *this + d; }

    bool operator==(TimeStamp o) const { return ns == o.ns; }
    bool operator!=(TimeStamp o) const { return ns != o.ns; }
    bool operator<(TimeStamp o) const { return ns < o.ns; }
    bool operator<=(TimeStamp o) const { return ns <= o.ns; }
    bool operator>(TimeStamp o) const { return ns > o.ns; }
    bool operator>=(TimeStamp o) const { return ns >= o.ns; }

    double to_ms() const { return static_cast<double>(ns) / 1e6; }
    Rational to_rational() const { return Rational(ns); }
};

inline Duration max(Duration a, Duration b) { return a < b ? b : a; }
inline Duration min(Duration a, Duration b) { return a < b ? a : b; }
inline TimeStamp max(TimeStamp a, TimeStamp b) { return a < b ? b : a; }
inline TimeStamp min(TimeStamp a, TimeStamp b) { return a < b ? a : b; }

} // namespace hetsched
