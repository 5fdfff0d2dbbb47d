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

#include "hetsched/rational.hpp"

using namespace hetsched;

TEST_CASE("rational normalizes to lowest terms with positive denominator") {
    CHECK(Rational::of(2, 4) == Rational::of(1, 2));
    CHECK(Rational::of(-2, 4) == Rational::of(-1, 2));
    CHECK(Rational::of(1, -2) == Rational::of(-1, 2));
    CHECK(Rational::of(-3, -9) == Rational::of(1, 3));
    CHECK(Rational::of(0, 7) == Rational(0));
    CHECK(Rational::of(1, -2).den() > 0);
}

TEST_CASE("rational arithmetic on pinned cases") {
    CHECK(Rational::of(1, 3) + Rational::of(1, 6) == Rational::of(1, 2));
    CHECK(Rational::of(1, 2) - Rational::of(2, 3) == Rational::of(-1, 6));
    CHECK(Rational::of(3, 4) * Rational::of(2, 9) == Rational::of(1, 6));
    CHECK(Rational::of(3, 4) / Rational::of(9, 2) == Rational::of(1, 6));
    CHECK(-Rational::of(5, 7) == Rational::of(-5, 7));
}

TEST_CASE("rational comparisons are exact") {
    CHECK(Rational::of(1, 3) < Rational::of(34, 100));
    CHECK(Rational::of(-1, 2) < Rational::of(-1, 3));
    CHECK(Rational::of(7, 7) == Rational(1));
    CHECK(Rational::of(10, 3) > Rational(3));
    // A case where doubles cannot tell the two apart.
    Rational big_a = Rational::of(std::int64_t{1} << 62, 3);
    Rational big_b = Rational::of((std::int64_t{1} << 62) + 1, 3);
    CHECK(big_a < big_b);
}

TEST_CASE("floor ceil and round with negative values and ties") {
    CHECK(Rational::of(7, 2).floor_to_int64() == 3);
    CHECK(Rational::of(7, 2).ceil_to_int64() == 4);
    CHECK(Rational::of(-7, 2).floor_to_int64() == -4);
    CHECK(Rational::of(-7, 2).ceil_to_int64() == -3);
    CHECK(Rational(5).floor_to_int64() == 5);
    CHECK(Rational(5).ceil_to_int64() == 5);

    // Rounding is to nearest, ties away from zero.
    CHECK(Rational::of(1, 2).round_to_int64() == 1);
    CHECK(Rational::of(-1, 2).round_to_int64() == -1);
    CHECK(Rational::of(3, 2).round_to_int64() == 2);
    CHECK(Rational::of(-3, 2).round_to_int64() == -2);
    CHECK(Rational::of(2, 5).round_to_int64() == 0);
    CHECK(Rational::of(3, 5).round_to_int64() == 1);
    CHECK(Rational::of(-2, 5).round_to_int64() == 0);
    CHECK(Rational::of(-3, 5).round_to_int64() == -1);
}

TEST_CASE("rational overflow raises instead of wrapping") {
    Rational huge = Rational::of(std::int64_t{1} << 62, 1);
    Rational sq = huge * huge; // still fits in 128 bits
    CHECK(sq > huge);
    CHECK_THROWS_AS(sq * sq, Error);
    try {
        (void)(sq * sq);
    } catch (const Error &e) {
        CHECK(e.code() == Errc::overflow);
    }
    CHECK_THROWS_AS(Rational(1) / Rational(0), Error);
}

TEST_CASE("rational to_string and to_double") {
    CHECK(Rational::of(3, 2).to_string() == "3/2");
    CHECK(Rational::of(-1, 2).to_string() == "-1/2");
    CHECK(Rational(5).to_string() == "5");
    CHECK(Rational(0).to_string() == "0");
    CHECK(Rational::of(1, 2).to_double() == 0.5);
    CHECK(Rational::of(1, 4).to_double() == 0.25);
}

TEST_CASE("rational algebraic identities over random values") {
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<std::int64_t> num(-1000000, 1000000);
    std::uniform_int_distribution<std::int64_t> den(1, 1000000);
    for (int i = 0; i < 500; ++i) {
        Rational a = Rational::of(num(rng), den(rng));
        Rational b = Rational::of(num(rng), den(rng));
        CHECK(a + b - b == a);
        CHECK(a + b == b + a);
        if (!b.is_zero())
            CHECK(a * b / b == a);
        CHECK(a - a == Rational(0));
        // Trichotomy.
        const int rel = (a < b ? 1 : 0) + (b < a ? 1 : 0) + (a == b ? 1 : 0);
        CHECK(rel == 1);
        // floor <= value <= ceil, and round is one of them.
        const std::int64_t fl = a.floor_to_int64();
        const std::int64_t ce = a.ceil_to_int64();
        const std::int64_t ro = a.round_to_int64();
        CHECK(Rational(fl) <= a);
        CHECK(a <= Rational(ce));
        CHECK((ro == fl || ro == ce));
    }
}
