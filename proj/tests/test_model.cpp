#include "parmc/gts.hpp"
#include "parmc/model.hpp"
#include "parmc/oracle.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace parmc;

TEST_CASE("ksg: minimal self-loop model") {
    ExplicitModel m = parse_explicit("init 0\nstate 0 [p]\nedge 0 0\n");
    CHECK(m.state_count() == 1);
    CHECK(m.init == 0);
    REQUIRE(m.edges[0].size() == 1);
    CHECK(m.edges[0][0] == 0);
    CHECK(m.props == std::vector<std::string>{"p"});
    CHECK(m.state_has_prop(0, 0));
}

TEST_CASE("ksg: two-state chain with comments and sparse ids") {
    ExplicitModel m = parse_explicit(
        "# a chain\n"
        "init 10\n"
        "state 10 []\n"
        "state 20 [q]\n"
        "edge 10 20   # the only edge\n");
    CHECK(m.state_count() == 2);
    CHECK(m.init == 0);
    CHECK(m.edges[0] == std::vector<std::uint32_t>{1});
    CHECK(m.labels[0].empty());
    CHECK(m.state_has_prop(1, 0));
}

TEST_CASE("ksg: errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_explicit("init 0\nstate 0 []\nedge 0 1\n"),
                         doctest::Contains("undeclared state 1"), ModelError);
    CHECK_THROWS_WITH_AS(parse_explicit("state 0 []\n"), doctest::Contains("missing init"),
                         ModelError);
    CHECK_THROWS_WITH_AS(parse_explicit("init 0\nstate 0 []\nbogus 1\n"),
                         doctest::Contains("line 3"), ModelError);
    CHECK_THROWS_WITH_AS(
        parse_explicit("init 0\nstate 0 []\nedge 0 0\nedge 0 0\n"),
        doctest::Contains("duplicate edge"), ModelError);
    CHECK_THROWS_AS(parse_explicit("init 0\nstate 0 []\nstate 0 [p]\n"), ModelError);
}

TEST_CASE("ksg: successor order follows edge order") {
    ExplicitModel m = parse_explicit(
        "init 0\nstate 0 []\nstate 1 []\nstate 2 []\nedge 0 2\nedge 0 1\n");
    CHECK(m.edges[0] == std::vector<std::uint32_t>{2, 1});
    ExplicitGraphModel gm(m);
    std::vector<StateVector> succ;
    gm.successors(gm.initial(), succ);
    REQUIRE(succ.size() == 2);
    CHECK(ExplicitGraphModel::decode(succ[0]) == 2);
    CHECK(ExplicitGraphModel::decode(succ[1]) == 1);
}

TEST_CASE("gts: two-state system from the one-liner") {
    auto m = parse_gts("var x:0..1 init 0; rule x==0 -> x:=1; prop done: x==1;");
    std::vector<StateVector> succ;
    StateVector init = m->initial();
    m->successors(init, succ);
    REQUIRE(succ.size() == 1);
    LabelBits bits;
    bits.resize_for(1);
    m->labeling(init, bits);
    CHECK_FALSE(bits.test(0));
    m->labeling(succ[0], bits);
    CHECK(bits.test(0));
    // The successor state is a dead end.
    std::vector<StateVector> succ2;
    m->successors(succ[0], succ2);
    CHECK(succ2.empty());
}

TEST_CASE("gts: no applicable rule means no successors") {
    auto m = parse_gts("var x:0..3 init 2; rule x==0 -> x:=1;");
    std::vector<StateVector> succ;
    m->successors(m->initial(), succ);
    CHECK(succ.empty());
}

TEST_CASE("gts: range violation surfaces at exploration time") {
    auto m = parse_gts("var x:0..1 init 0; rule x<=1 -> x:=x+1;");
    std::vector<StateVector> succ;
    m->successors(m->initial(), succ);   // 0 -> 1 is fine
    REQUIRE(succ.size() == 1);
    StateVector one = succ[0];
    CHECK_THROWS_WITH_AS(m->successors(one, succ), doctest::Contains("outside range"),
                         ModelError);
}

TEST_CASE("gts: simultaneous assignment and duplicate suppression") {
    auto m = parse_gts(
        "var x:0..1 init 0; var y:0..1 init 1;"
        "rule true -> x:=y, y:=x;"       // swap
        "rule true -> x:=1-x, y:=1-y;"   // also lands on (1,0)
        "prop swapped: x==1 and y==0;");
    std::vector<StateVector> succ;
    m->successors(m->initial(), succ);
    CHECK(succ.size() == 1);   // both rules produce the same state
    LabelBits bits;
    bits.resize_for(1);
    m->labeling(succ[0], bits);
    CHECK(bits.test(0));
}

TEST_CASE("gts: parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_gts("var x:0..1 init 0;\nrule x == -> x:=1;"),
                         doctest::Contains("line 2"), ModelError);
    CHECK_THROWS_AS(parse_gts("rule x==0 -> x:=1;"), ModelError);   // unknown variable
    CHECK_THROWS_AS(parse_gts("var x:1..0 init 1;"), ModelError);   // empty range
}

TEST_CASE("generators: reject out-of-range sizes") {
    CHECK_THROWS_AS(generate_token_ring(1), ModelError);
    CHECK_THROWS_AS(generate_token_ring(31), ModelError);
    CHECK_THROWS_AS(generate_philosophers(1), ModelError);
    CHECK_THROWS_AS(generate_philosophers(17), ModelError);
}

TEST_CASE("token ring: reachable count is 3*n*2^(n-1) and runs are stable") {
    for (unsigned n : {2u, 3u, 5u}) {
        auto m = generate_token_ring(n);
        ExplicitModel g1 = enumerate_model(*m, 1u << 20);
        ExplicitModel g2 = enumerate_model(*generate_token_ring(n), 1u << 20);
        CHECK(g1.state_count() == 3u * n * (1u << (n - 1)));
        CHECK(g1.state_count() == g2.state_count());
    }
}

TEST_CASE("token ring: initial labeling has no station critical") {
    auto m = generate_token_ring(2);
    LabelBits bits;
    bits.resize_for(m->propositions().size());
    m->labeling(m->initial(), bits);
    for (std::size_t i = 0; i < m->propositions().size(); ++i) CHECK_FALSE(bits.test(i));
}

TEST_CASE("token ring: EF(cs_0) and mutual exclusion hold on n=2 (oracle)") {
    ExplicitModel g = enumerate_model(*generate_token_ring(2), 1u << 16);
    CHECK(oracle_check(g, parse_formula("E<>(cs_0)")));
    CHECK(oracle_check(g, parse_formula("A[](-(cs_0 and cs_1))")));
}

TEST_CASE("philosophers: initial labeling empty; EF(eat_0) true; AF(eat_0) false") {
    auto m = generate_philosophers(2);
    LabelBits bits;
    bits.resize_for(m->propositions().size());
    m->labeling(m->initial(), bits);
    for (std::size_t i = 0; i < m->propositions().size(); ++i) CHECK_FALSE(bits.test(i));

    ExplicitModel g = enumerate_model(*m, 1u << 16);
    CHECK(oracle_check(g, parse_formula("E<>(eat_0)")));
    CHECK_FALSE(oracle_check(g, parse_formula("A<>(eat_0)")));   // the deadlock path
}

TEST_CASE("philosophers: the all-hold-left deadlock is reachable for every n") {
    for (unsigned n : {2u, 3u, 4u}) {
        ExplicitModel g = enumerate_model(*generate_philosophers(n), 1u << 18);
        bool dead = false;
        for (std::size_t s = 0; s < g.state_count(); ++s)
            if (g.edges[s].empty()) dead = true;
        CHECK(dead);
    }
}

TEST_CASE("canonical encoding: equal vectors iff equal GTS valuations") {
    auto m = parse_gts(
        "var a:0..7 init 0; var b:0..300 init 0;"
        "rule a<7 -> a:=a+1; rule b+37<=300 -> b:=b+37; rule a>0 and b>0 -> a:=a-1, b:=b-1;");
    // Fuzz walk: states met twice must encode identically; distinct
    // valuations must encode differently (checked via a set keyed on bytes).
    std::mt19937 rng(7);
    std::set<StateVector> seen;
    StateVector cur = m->initial();
    std::vector<StateVector> succ;
    for (int step = 0; step < 2000; ++step) {
        seen.insert(cur);
        m->successors(cur, succ);
        if (succ.empty()) break;
        cur = succ[rng() % succ.size()];
    }
    // Re-walk deterministically: every encoding seen again must hit the set.
    std::mt19937 rng2(7);
    cur = m->initial();
    for (int step = 0; step < 2000; ++step) {
        CHECK(seen.count(cur) == 1);
        m->successors(cur, succ);
        if (succ.empty()) break;
        cur = succ[rng2() % succ.size()];
    }
}

TEST_CASE("successor determinism across repeated calls") {
    auto m = generate_philosophers(3);
    std::vector<StateVector> a, b;
    std::vector<StateVector> frontier{m->initial()};
    for (int round = 0; round < 50 && !frontier.empty(); ++round) {
        StateVector s = frontier.back();
        frontier.pop_back();
        m->successors(s, a);
        m->successors(s, b);
        CHECK(a == b);
        for (auto& v : a) frontier.push_back(v);
        if (frontier.size() > 200) frontier.resize(200);
    }
}
