#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>

#include "sep1d/io.hpp"
#include "sep1d/noise.hpp"

using namespace sep1d;

TEST_CASE("17-digit formatting round-trips doubles exactly", "[io]") {
    RngStream rng(13, 13);
    for (int k = 0; k < 500; ++k) {
        const double mantissa = rng.uniform_pm1();
        const double expo = 60.0 * rng.uniform_pm1();
        const double x = mantissa * std::pow(10.0, expo);
        REQUIRE(std::stod(fmt_g17(x)) == x);
    }
    REQUIRE(std::stod(fmt_g17(0.1)) == 0.1);
    REQUIRE(fmt_g17(1.0) == "1");
    REQUIRE(fmt_g17(0.0) == "0");
}

TEST_CASE("json writer emits valid structure and escapes strings", "[io]") {
    std::ostringstream os;
    JsonWriter w(os);
    w.begin_object();
    w.key("a").value(1.5);
    w.key("b").begin_array().value(1).value(2).end_array();
    w.key("s").value("quote\"backslash\\");
    w.key("flag").value(true);
    w.end_object();
    REQUIRE(os.str() ==
            "{\"a\":1.5,\"b\":[1,2],\"s\":\"quote\\\"backslash\\\\\",\"flag\":true}");
}

TEST_CASE("run csv carries one row per frame", "[io]") {
    PathRecord rec;
    for (int k = 0; k < 3; ++k) {
        DiagnosticFrame f;
        f.t = 0.5 * k;
        f.composite = 1.0 + k;
        rec.frames.push_back(f);
    }
    std::ostringstream os;
    write_run_csv(os, rec);
    const std::string text = os.str();
    std::size_t rows = 0;
    for (char c : text)
        if (c == '\n') ++rows;
    REQUIRE(rows == 4); // header + 3 frames
    REQUIRE(text.rfind("t,rel_energy,", 0) == 0);
}
