#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "speclab/config.hpp"
#include "speclab/rng.hpp"

using namespace speclab;

TEST_CASE("config parses sections, comments, and values") {
    const char* text =
        "experiment = demo   # trailing comment\n"
        "\n"
        "[scheme]\n"
        "tau = 0.5\n"
        "steps = 200\n"
        "# full-line comment\n"
        "[initial]\n"
        "kind = band_limited_expression\n"
        "expr = 0.9*sin(2*pi*x)\n";
    Config c = parse_config(text);
    CHECK(c.get("", "experiment") == "demo");
    CHECK(c.get_double("scheme", "tau") == doctest::Approx(0.5));
    CHECK(c.get_int("scheme", "steps") == 200);
    CHECK(c.get("initial", "expr") == "0.9*sin(2*pi*x)");
    CHECK(c.get_or("scheme", "missing", "fallback") == "fallback");
    CHECK(c.get_double_or("scheme", "nu", 0.01) == doctest::Approx(0.01));
    CHECK_THROWS_AS(c.get("scheme", "missing"), std::invalid_argument);
    CHECK_THROWS_AS(c.get_double("initial", "kind"), std::invalid_argument);
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_AS(parse_config("[unterminated\nk = v\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("just a bare line\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("= value\n"), std::invalid_argument);
}

TEST_CASE("serialization round-trips bit-identically") {
    Config c;
    c.set("", "experiment", "ac_margin");
    c.set_double("scheme", "tau", 0.1);
    c.set_double("scheme", "nu", 0.02);
    c.set_int("scheme", "N", 256);
    c.set("initial", "expr", "sin(2*pi*x)");
    std::string s1 = serialize_config(c);
    Config back = parse_config(s1);
    std::string s2 = serialize_config(back);
    CHECK(s1 == s2);
    CHECK(config_hash(c) == config_hash(back));

    // Doubles survive the text round trip exactly.
    double tricky = 0.1 + 0.2;
    c.set_double("scheme", "tau", tricky);
    Config again = parse_config(serialize_config(c));
    CHECK(again.get_double("scheme", "tau") == tricky);
}

TEST_CASE("hash is order independent and content sensitive") {
    Config a;
    a.set("s", "x", "1");
    a.set("s", "y", "2");
    Config b;
    b.set("s", "y", "2");
    b.set("s", "x", "1");
    CHECK(config_hash(a) == config_hash(b));
    b.set("s", "y", "3");
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("atomic write replaces the file completely") {
    const std::string path = "test_cli_io_scratch.txt";
    write_file_atomic(path, "first version\n");
    write_file_atomic(path, "second\n");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "second\n");
    std::remove(path.c_str());
}

TEST_CASE("counter rng is reproducible and well distributed") {
    CounterRng r1(123456789ULL);
    CounterRng r2(123456789ULL);
    for (std::uint64_t i = 0; i < 16; ++i) CHECK(r1.raw(i) == r2.raw(i));
    CounterRng r3(987654321ULL);
    int diff = 0;
    for (std::uint64_t i = 0; i < 64; ++i)
        if (r1.raw(i) != r3.raw(i)) ++diff;
    CHECK(diff == 64);
    double mean = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) mean += r1.uniform(i);
    mean /= 10000;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
    for (std::uint64_t i = 0; i < 100; ++i) {
        double v = r1.symmetric(i);
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
}
