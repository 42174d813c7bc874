#include <catch_amalgamated.hpp>

#include <random>

#include "mmlab/decimal.hpp"

using namespace mmlab;

TEST_CASE("decimal parse and canonical format") {
    CHECK(dec("0").units() == 0);
    CHECK(dec("1").units() == 100'000'000);
    CHECK(dec("0.00000001").units() == 1);
    CHECK(dec("-19.10").str() == "-19.1");
    CHECK(dec("100.50").str() == "100.5");
    CHECK(dec("123").str() == "123");
    CHECK(dec("0.10000000").str() == "0.1");
    CHECK(dec("+2.5").units() == dec("2.5").units());

    CHECK_THROWS_AS(Decimal::parse(""), Error);
    CHECK_THROWS_AS(Decimal::parse("1e5"), Error);
    CHECK_THROWS_AS(Decimal::parse("1.000000001"), Error);  // 9 fractional digits
    CHECK_THROWS_AS(Decimal::parse("abc"), Error);
    CHECK_THROWS_AS(Decimal::parse("-"), Error);
    CHECK_THROWS_AS(Decimal::parse("1,5"), Error);
}

TEST_CASE("decimal arithmetic is exact") {
    CHECK(dec("0.1") + dec("0.2") == dec("0.3"));
    CHECK(dec("1") - dec("0.00000001") == dec("0.99999999"));
    CHECK(dec("12.55") - dec("12.90") == dec("-0.35"));
    CHECK(dec("100.5") * dec("0.1") == dec("10.05"));
    CHECK(dec("110") * dec("0.1999") == dec("21.989"));
    CHECK(dec("2") / dec("20") == dec("0.1"));
    CHECK(-dec("1.5") == dec("-1.5"));
}

TEST_CASE("division and multiplication round half to even at 8 dp") {
    // 1 / 3 = 0.33333333|3 -> down
    CHECK(dec("1") / dec("3") == dec("0.33333333"));
    // 2 / 3 = 0.66666666|6 -> up
    CHECK(dec("2") / dec("3") == dec("0.66666667"));
    // exact half: 0.00000001 * 0.5 = 0.000000005 -> to even (0)
    CHECK(dec("0.00000001") * dec("0.5") == dec("0"));
    CHECK(dec("0.00000003") * dec("0.5") == dec("0.00000002"));
    CHECK_THROWS_AS(dec("1") / dec("0"), Error);
}

TEST_CASE("div_floor floors toward negative infinity") {
    CHECK(Decimal::div_floor(dec("1000"), dec("99.5")) == dec("10.05025125"));
    CHECK(Decimal::div_floor(dec("1"), dec("3")) == dec("0.33333333"));
    CHECK(Decimal::div_floor(dec("-1"), dec("3")) == dec("-0.33333334"));
}

TEST_CASE("sized orders never exceed the funding budget") {
    std::mt19937_64 rng(20240901);
    for (int i = 0; i < 20'000; ++i) {
        Decimal budget = Decimal::from_units(static_cast<std::int64_t>(rng() % 1'000'000'000'000));
        Decimal price = Decimal::from_units(1 + static_cast<std::int64_t>(rng() % 50'000'000'000));
        Decimal qty = Decimal::div_floor(budget, price);
        REQUIRE(price * qty <= budget);
    }
}

TEST_CASE("tick rounding") {
    CHECK(dec("99.567").floor_to(2) == dec("99.56"));
    CHECK(dec("99.567").ceil_to(2) == dec("99.57"));
    CHECK(dec("99.56").floor_to(2) == dec("99.56"));
    CHECK(dec("99.56").ceil_to(2) == dec("99.56"));
    CHECK(dec("-0.001").floor_to(2) == dec("-0.01"));
    CHECK(dec("-0.001").ceil_to(2) == dec("0"));
}

TEST_CASE("fixed display rounds half away from zero") {
    CHECK(dec("10").fixed(6) == "10.000000");
    CHECK(dec("-19.1").fixed(2) == "-19.10");
    CHECK(dec("1.005").fixed(2) == "1.01");
    CHECK(dec("-1.005").fixed(2) == "-1.01");
    CHECK(dec("0.004999").fixed(2) == "0.00");
    CHECK(dec("25.89").fixed(2) == "25.89");
    CHECK(dec("3").fixed(0) == "3");
}

TEST_CASE("overflow is an error, not wraparound") {
    Decimal big = Decimal::from_units(INT64_MAX - 10);
    CHECK_THROWS_AS(big + big, Error);
    CHECK_THROWS_AS(big * dec("2"), Error);
}
