#include <vector>

#include <doctest.h>

#include "sharpen/collapse.hpp"

using namespace sharpen;

TEST_CASE("constant sub-threshold series never collapses") {
    const std::vector<double> s(500, 0.5);
    CHECK_FALSE(detect_collapse(s).has_value());
}

TEST_CASE("series that reaches and stays above threshold") {
    std::vector<double> s(500, 0.6);
    for (std::size_t i = 100; i < s.size(); ++i) s[i] = 0.995;
    REQUIRE(detect_collapse(s).has_value());
    CHECK(*detect_collapse(s) == 100);
}

TEST_CASE("oscillation across the threshold never collapses") {
    std::vector<double> s(500);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = (i / 10) % 2 == 0 ? 0.995 : 0.98;
    CHECK_FALSE(detect_collapse(s).has_value());
}

TEST_CASE("short tail windows are truncated at the end") {
    std::vector<double> s(100, 0.2);
    for (std::size_t i = 80; i < s.size(); ++i) s[i] = 0.999;
    REQUIRE(detect_collapse(s).has_value());
    CHECK(*detect_collapse(s) == 80);
    // An early run of 49 does not count when it is followed by a dip.
    std::vector<double> t(200, 0.2);
    for (std::size_t i = 10; i < 59; ++i) t[i] = 0.999;
    CHECK_FALSE(detect_collapse(t).has_value());
    for (std::size_t i = 10; i < 60; ++i) t[i] = 0.999;
    CHECK(*detect_collapse(t) == 10);
    CHECK(*detect_collapse(std::vector<double>{0.99}) == 0);
}
