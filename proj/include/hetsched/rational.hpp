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

namespace hetsched {

using Int128 = __int128;

inline Int128 int128_abs(Int128 v) { return v < 0 ? -v : v; }

inline std::string int128_to_string(Int128 v) {
    if (v == 0)
        return "0";
    bool neg = v < 0;
    // Peel digits from |v|; -INT128_MIN does not overflow unsigned.
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    std::string out;
    while (u > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg)
        out.push_back('-');
    return std::string(out.rbegin(), out.rend());
}

/// Exact rational over 128-bit integers, always stored normalized
/// (den > 0, gcd(|num|, den) == 1). Every operation checks for overflow
/// and throws Errc::overflow instead of wrapping.
///
/// Sub-deadlines and rank values are kept in this form so that identities
/// such as "critical-path sub-deadlines sum to the DAG deadline" hold
/// exactly rather than within a floating-point tolerance.
class Rational {
  public:
    constexpr Rational() = default;
    Rational(std::int64_t value) : num_(value), den_(1) {} // NOLINT: implicit by design

    static Rational of(Int128 num, Int128 den) {
        Rational r;
        r.assign(num, den);
        return r;
    }

    Int128 num() const { return num_; }
    Int128 den() const { return den_; }
    std::int64_t num_int64() const {
        if (num_ > Int128{INT64_MAX} || num_ < Int128{INT64_MIN})
            raise(Errc::overflow, "rational numerator exceeds 64 bits");
        return static_cast<std::int64_t>(num_);
    }
    std::int64_t den_int64() const {
        if (den_ > Int128{INT64_MAX})
            raise(Errc::overflow, "rational denominator exceeds 64 bits");
        return static_cast<std::int64_t>(den_);
    }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_positive() const { return num_ > 0; }

    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    Rational operator+(const Rational &o) const {
        // a/b + c/d = (a*d + c*b) / (b*d), normalized afterwards.
        Int128 ad = checked_mul(num_, o.den_);
        Int128 cb = checked_mul(o.num_, den_);
        Int128 n = checked_add(ad, cb);
        Int128 d = checked_mul(den_, o.den_);
        return of(n, d);
    }

    Rational operator-(const Rational &o) const { return *this + (-o); }

    Rational operator*(const Rational &o) const {
        // Cross-reduce first to keep intermediate magnitudes small.
        Int128 g1 = gcd128(int128_abs(num_), o.den_);
        Int128 g2 = gcd128(int128_abs(o.num_), den_);
        Int128 n = checked_mul(num_ / g1, o.num_ / g2);
        Int128 d = checked_mul(den_ / g2, o.den_ / g1);
        return of(n, d);
    }

    Rational operator/(const Rational &o) const {
        if (o.num_ == 0)
            raise(Errc::overflow, "rational division by zero");
        Rational inv;
        inv.assign(o.den_, o.num_);
        return *this * inv;
    }

    Rational &operator+=(const Rational &o) { return *this = *this + o; }
    Rational &operator-=(const Rational &o) { return *this = *this - o; }
    Rational &operator*=(const Rational &o) { return *this = *this * o; }
    Rational &operator/=(const Rational &o) { return *this = *this / o; }

    bool operator==(const Rational &o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational &o) const { return !(*this == o); }

    bool operator<(const Rational &o) const {
        // Compare a/b < c/d via a*d < c*b; denominators are positive.
        return checked_mul(num_, o.den_) < checked_mul(o.num_, den_);
    }
    bool operator>(const Rational &o) const { return o < *this; }
    bool operator<=(const Rational &o) const { return !(o < *this); }
    bool operator>=(const Rational &o) const { return !(*this < o); }

    /// Largest integer <= value.
    std::int64_t floor_to_int64() const {
        Int128 q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0)
            q -= 1;
        return narrow(q);
    }

    /// Smallest integer >= value.
    std::int64_t ceil_to_int64() const {
        Int128 q = num_ / den_;
        if (num_ % den_ != 0 && num_ > 0)
            q += 1;
        return narrow(q);
    }

    /// Nearest integer, ties away from zero.
    std::int64_t round_to_int64() const {
        Int128 doubled_rem = 2 * int128_abs(num_ % den_);
        Int128 q = int128_abs(num_) / den_;
        if (doubled_rem >= den_)
            q += 1;
        return narrow(num_ < 0 ? -q : q);
    }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string to_string() const {
        if (den_ == 1)
            return int128_to_string(num_);
        return int128_to_string(num_) + "/" + int128_to_string(den_);
    }

    static Int128 gcd128(Int128 a, Int128 b) {
        a = int128_abs(a);
        b = int128_abs(b);
        while (b != 0) {
            Int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

  private:
    void assign(Int128 num, Int128 den) {
        if (den == 0)
            raise(Errc::overflow, "rational with zero denominator");
        if (den < 0) {
            num = checked_neg(num);
            den = checked_neg(den);
        }
        Int128 g = gcd128(num, den);
        num_ = num / g;
        den_ = den / g;
    }

    static Int128 checked_add(Int128 a, Int128 b) {
        Int128 r;
        if (__builtin_add_overflow(a, b, &r))
            raise(Errc::overflow, "rational addition overflow");
        return r;
    }

    static Int128 checked_mul(Int128 a, Int128 b) {
        Int128 r;
        if (__builtin_mul_overflow(a, b, &r))
            raise(Errc::overflow, "rational multiplication overflow");
        return r;
    }

    static Int128 checked_neg(Int128 a) {
        Int128 r;
        if (__builtin_sub_overflow(Int128{0}, a, &r))
            raise(Errc::overflow, "rational negation overflow");
        return r;
    }

    static std::int64_t narrow(Int128 v) {
        if (v > Int128{INT64_MAX} || v < Int128{INT64_MIN})
            raise(Errc::overflow, "rational does not fit in 64 bits");
        return static_cast<std::int64_t>(v);
    }

    Int128 num_{0};
    Int128 den_{1};
};

} // namespace hetsched
