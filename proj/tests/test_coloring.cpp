#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "canon/canonicity.hpp"
#include "canon/coloring.hpp"

using namespace canon;

TEST_CASE("generators") {
    Coloring c = gen_constant(2, 5);
    CHECK(c.color_count == 1);
    CHECK(c.eval(Subset{1, 2}) == 0);
    CHECK(c.eval(Subset{4, 5}) == 0);

    Coloring inj = gen_injective(2, 5);
    CHECK(inj.color_count == 10);
    CHECK(inj.eval(Subset{1, 2}) == 0);
    CHECK(inj.eval(Subset{2, 3}) == 2);

    Coloring minp = gen_min_position(2, 6, 1);  // f(i,j) = i
    CHECK(minp.eval(Subset{2, 5}) == minp.eval(Subset{2, 6}));
    CHECK(minp.eval(Subset{2, 5}) != minp.eval(Subset{3, 5}));
}

TEST_CASE("canonical generator edge patterns") {
    // empty pattern is the constant coloring
    CHECK(gen_canonical(2, 6, 0) == gen_constant(2, 6));
    // full pattern is injective
    CHECK(gen_canonical(2, 6, 0b11) == gen_injective(2, 6));
    // min-position is the singleton pattern
    CHECK(gen_min_position(3, 7, 2) == gen_canonical(3, 7, 0b010));
}

TEST_CASE("random generator is deterministic and respects the color budget") {
    Coloring a = gen_random(2, 8, 3, 12345);
    Coloring b = gen_random(2, 8, 3, 12345);
    CHECK(a == b);
    Coloring c = gen_random(2, 8, 3, 54321);
    CHECK(a.color_count <= 3);
    CHECK((a == c) == false);  // overwhelmingly likely distinct
}

TEST_CASE("normalization maps renamed colorings to identical storage") {
    Coloring a = gen_random(2, 7, 4, 99);
    Coloring b = a;
    // rename colors injectively: c -> 3*c + 5, then normalize again
    for (auto& v : b.values) v = 3 * v + 5;
    b.normalize();
    CHECK(a == b);
}

TEST_CASE("file round trip is byte-identical for normalized files") {
    Coloring c = gen_random(2, 6, 3, 7);
    std::ostringstream out1;
    write_coloring(out1, c);
    std::istringstream in(out1.str());
    Coloring back = read_coloring(in);
    CHECK(back == c);
    std::ostringstream out2;
    write_coloring(out2, back);
    CHECK(out1.str() == out2.str());
}

TEST_CASE("reader accepts comments and any line order") {
    std::string text =
        "# a comment\n"
        "CANON v1 1 3\n"
        "3 7   # trailing comment\n"
        "1 7\n"
        "2 9\n";
    std::istringstream in(text);
    Coloring c = read_coloring(in);
    CHECK(c.arity == 1);
    CHECK(c.domain == 3);
    CHECK(c.eval(Subset{1}) == c.eval(Subset{3}));
    CHECK(c.eval(Subset{1}) != c.eval(Subset{2}));
}

TEST_CASE("reader reports the offending line") {
    auto expect_line = [](const std::string& text, size_t line) {
        std::istringstream in(text);
        try {
            read_coloring(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line_no == line);
        }
    };
    expect_line("CANON v1 2 3\n1 2 0\n1 2 1\n2 3 0\n1 3 0\n", 3);  // duplicate tuple
    expect_line("CANON v1 2 3\n2 1 0\n1 3 0\n2 3 0\n", 2);         // not increasing
    expect_line("CANON v1 2 3\n1 2 0\n1 3 0\n", 3);                // incomplete
    expect_line("CANON v2 2 3\n", 1);                              // bad header
    expect_line("CANON v1 2 3\n1 4 0\n1 2 0\n2 3 0\n", 2);         // out of domain
}

TEST_CASE("canonical(v) generations are canonical with pattern v") {
    for (uint32_t N = 2; N <= 10; ++N)
        for (uint32_t mask = 0; mask < 4; ++mask) {
            Coloring c = gen_canonical(2, N, mask);
            Subset all(N);
            for (uint32_t i = 0; i < N; ++i) all[i] = i + 1;
            auto pats = find_patterns(c, all);
            bool has = false;
            for (auto p : pats) has = has || p.mask == mask;
            INFO("N=" << N << " mask=" << mask);
            CHECK(has);
        }
}
