#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fadbio/csv.hpp"
#include "fadbio/rng.hpp"
#include "util.hpp"

using namespace fadbio;

TEST_CASE("line splitting keeps empty fields") {
    const auto f = split_csv_line("a,,b,");
    REQUIRE(f.size() == 4);
    CHECK(f[0] == "a");
    CHECK(f[1] == "");
    CHECK(f[2] == "b");
    CHECK(f[3] == "");
    CHECK(split_csv_line("").size() == 1);
    CHECK(split_csv_line("single").size() == 1);
}

TEST_CASE("number parsing is strict") {
    CHECK(parse_double("1.5") == 1.5);
    CHECK(parse_double("-3e2") == -300.0);
    CHECK(parse_double("0.5") == 0.5);
    CHECK_FALSE(parse_double(""));
    CHECK_FALSE(parse_double("1.2x"));
    CHECK_FALSE(parse_double("x1.2"));
    CHECK_FALSE(parse_double("1.2 "));
    CHECK(parse_int("42") == 42);
    CHECK(parse_int("-7") == -7);
    CHECK_FALSE(parse_int("4.2"));
    CHECK_FALSE(parse_int(""));
}

TEST_CASE("double formatting round-trips exactly") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        double v;
        switch (i % 4) {
            case 0: v = rng.uniform(-1e6, 1e6); break;
            case 1: v = rng.lognormal(0.0, 10.0); break;
            case 2: v = -rng.lognormal(0.0, 10.0); break;
            default: v = static_cast<double>(rng.uniform_int(-1000, 1000)); break;
        }
        const auto back = parse_double(format_double(v));
        REQUIRE(back.has_value());
        CHECK(*back == v);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
}

TEST_CASE("csv parsing separates header from rows and tracks line numbers") {
    CsvTable t = parse_csv("a,b\n1,2\n\n3,4\n");
    REQUIRE(t.header.size() == 2);
    REQUIRE(t.rows.size() == 2);  // blank line skipped
    CHECK(t.rows[0][1] == "2");
    CHECK(t.line_numbers[0] == 2);
    CHECK(t.line_numbers[1] == 4);
    CHECK_THROWS_AS(parse_csv(""), std::runtime_error);
}

TEST_CASE("file io: atomic write, read back, digest stability") {
    TempDir tmp;
    const std::string path = tmp.file("t.csv", "h1,h2\nx,y\n");
    CHECK(read_text_file(path) == "h1,h2\nx,y\n");
    const CsvTable t = read_csv(path);
    CHECK(t.rows.size() == 1);
    CHECK(file_digest(path) == file_digest(path));
    const std::string other = tmp.file("u.csv", "h1,h2\nx,z\n");
    CHECK(file_digest(path) != file_digest(other));
    CHECK_THROWS_AS(read_csv((tmp.path / "missing.csv").string()), std::runtime_error);
    CHECK_THROWS_AS(read_text_file((tmp.path / "missing.csv").string()), std::runtime_error);
}

TEST_CASE("fnv digest matches the published test vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hex64(0xcbf29ce484222325ull) == "cbf29ce484222325");
}
