#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "arn/dsl/complexity.hpp"
#include "arn/dsl/parser.hpp"
#include "arn/dsl/pretty.hpp"
#include "arn/dsl/typecheck.hpp"
#include "arn/dsl/zoo.hpp"

using namespace arn::dsl;

TEST_CASE("zoo corpus: ten programs, all parse and round-trip") {
    const auto& names = zoo_names();
    REQUIRE(names.size() == 10);
    std::set<std::string> expected = {"lstm",    "pendulum-small", "rnn-min",    "a1-3w",
                                      "a2-crop", "a3-pendulum",    "a4-fordb",   "a5-wingbeat",
                                      "a6-lsst", "a7-wisdm"};
    CHECK(std::set<std::string>(names.begin(), names.end()) == expected);

    for (const auto& name : names) {
        CAPTURE(name);
        NeuronProgram p = zoo_program(name);
        // print -> parse -> identical AST
        NeuronProgram q = parse(pretty_print(p));
        CHECK(equal(p, q));
        CHECK_NOTHROW(typecheck(p));
    }
}

TEST_CASE("node counts of the three small corpus programs") {
    // hand-counted on the sources
    CHECK(node_count(zoo_program("rnn-min").body) == 11);
    CHECK(node_count(zoo_program("pendulum-small").body) == 24);
    CHECK(node_count(zoo_program("lstm").body) == 61);
}

TEST_CASE("complexity equals node count times log2 of the alphabet size") {
    REQUIRE(symbol_alphabet().size() == 29);
    double bit = std::log2(29.0);
    for (const auto& name : zoo_names()) {
        CAPTURE(name);
        NeuronProgram p = zoo_program(name);
        CHECK(complexity(p) == doctest::Approx(node_count(p.body) * bit).epsilon(1e-12));
    }
}

TEST_CASE("complexity is monotone under wrapping") {
    NeuronProgram small = parse("( SelfPeep0, SelfPeep1, SelfPeep2, SelfPeep3, SelfOutput )");
    NeuronProgram bigger =
        parse("( SelfPeep0, SelfPeep1, SelfPeep2, SelfPeep3, tanh SelfOutput )");
    CHECK(complexity(bigger) > complexity(small));
}

TEST_CASE("complexity rejects broken cost tables") {
    NeuronProgram p = zoo_program("rnn-min");
    SymbolCost costs = default_symbol_cost();
    costs.erase("relu");
    CHECK_THROWS(complexity(p, costs));
    costs = default_symbol_cost();
    costs["relu"] = 0.0;
    CHECK_THROWS(complexity(p, costs));
}

TEST_CASE("parser accepts a full fun header and a bare body") {
    const char* body = "( 0.0, 0.0, 0.0, 0.0, lc0 InputsLC )";
    std::string full =
        "fun f ( SelfPeep0, SelfPeep1, SelfPeep2, SelfPeep3, SelfOutput, OtherPeepsLC, "
        "OtherOutputsLC, InputsLC ) = " +
        std::string(body);
    CHECK(equal(parse(body), parse(full)));
}

TEST_CASE("SML literal spellings") {
    NeuronProgram p = parse("( ~1.5, 2.0E~3, 0.5E2, 1.0, SelfOutput )");
    const auto* t = p.body->as<Tuple>();
    REQUIRE(t != nullptr);
    CHECK(t->elems[0]->as<RealConst>()->value == -1.5);
    CHECK(t->elems[1]->as<RealConst>()->value == doctest::Approx(2.0e-3).epsilon(1e-15));
    CHECK(t->elems[2]->as<RealConst>()->value == 50.0);
    // printing keeps the original spelling
    std::string printed = pretty_print(p);
    CHECK(printed.find("~1.5") != std::string::npos);
    CHECK(printed.find("2.0E~3") != std::string::npos);
}

TEST_CASE("format_real round-trips and uses SML spelling") {
    CHECK(format_real(-1.5) == "~1.5");
    CHECK(format_real(1.0) == "1.0");
    for (double v : {0.1, -3.25, 1e-9, -2.5e17, 123.456}) {
        CAPTURE(v);
        NeuronProgram p = parse("( " + format_real(v) +
                                ", 0.0, 0.0, 0.0, SelfOutput )");
        CHECK(p.body->as<Tuple>()->elems[0]->as<RealConst>()->value == v);
    }
}

TEST_CASE("comments are skipped") {
    NeuronProgram p =
        parse("(* header (* nested *) comment *) ( 0.0, 0.0, 0.0, 0.0, (* mid *) SelfOutput )");
    CHECK(p.body->is<Tuple>());
}

TEST_CASE("parse errors") {
    // unknown identifier
    CHECK_THROWS_AS(parse("( 0.0, 0.0, 0.0, 0.0, Mystery )"), ParseError);
    // weight mapping index out of range
    CHECK_THROWS_AS(parse("( 0.0, 0.0, 0.0, 0.0, lc5 InputsLC )"), ParseError);
    // wrong parameter order in the header
    CHECK_THROWS_AS(
        parse("fun f ( SelfPeep1, SelfPeep0, SelfPeep2, SelfPeep3, SelfOutput, OtherPeepsLC, "
              "OtherOutputsLC, InputsLC ) = ( 0.0, 0.0, 0.0, 0.0, 0.0 )"),
        ParseError);
    // let fun with two parameters
    CHECK_THROWS_AS(parse("let fun g A B = A in ( 0.0, 0.0, 0.0, 0.0, g 1.0 ) end"), ParseError);
    // unterminated case
    CHECK_THROWS_AS(parse("case SelfPeep0 of"), ParseError);
}

TEST_CASE("case binds scalars, tuples and lists") {
    // scalar binding
    CHECK_NOTHROW(typecheck(parse("case SelfPeep0 of X => ( X, X, X, X, X )")));
    // quintuple destructuring
    CHECK_NOTHROW(typecheck(parse(
        "case ( SelfPeep0, SelfPeep1, SelfPeep2, SelfPeep3, SelfOutput ) of ( A, B, C, D, E ) => "
        "( A, B, C, D, E )")));
    // list binding, as in the appendix programs
    CHECK_NOTHROW(typecheck(parse(
        "case cons( SelfPeep0, InputsLC ) of L => ( 0.0, 0.0, 0.0, 0.0, lc0 L )")));
}

TEST_CASE("type errors") {
    // result must be a quintuple
    CHECK_THROWS_AS(typecheck(parse("( SelfPeep0, SelfPeep1 )")), TypeError);
    // lists are not scalars
    CHECK_THROWS_AS(typecheck(parse("( 0.0, 0.0, 0.0, 0.0, InputsLC )")), TypeError);
    // cons head must be scalar
    CHECK_THROWS_AS(typecheck(parse("( 0.0, 0.0, 0.0, 0.0, lc0 cons( InputsLC, InputsLC ) )")),
                    TypeError);
    // scalar where a list is expected
    CHECK_THROWS_AS(typecheck(parse("( 0.0, 0.0, 0.0, 0.0, lc0 SelfPeep0 )")), TypeError);
    // binary operators need scalars
    CHECK_THROWS_AS(typecheck(parse("( 0.0, 0.0, 0.0, 0.0, SelfPeep0 + InputsLC )")), TypeError);
}

TEST_CASE("let fun: scalar and list arguments are inferred") {
    CHECK_NOTHROW(typecheck(
        parse("let fun g X = X * X in ( 0.0, 0.0, 0.0, 0.0, g SelfPeep0 ) end")));
    CHECK_NOTHROW(typecheck(
        parse("let fun g L = lc0 L in ( 0.0, 0.0, 0.0, 0.0, g InputsLC ) end")));
    // tuple-returning helper applied in case position, as in a4-fordb
    CHECK_NOTHROW(typecheck(parse(
        "let fun g X = ( X, X + 1.0 ) in "
        "( case g SelfPeep0 of ( A, B ) => A * B, 0.0, 0.0, 0.0, SelfOutput ) end")));
}

TEST_CASE("pretty printed zoo sources re-typecheck identically") {
    for (const auto& name : zoo_names()) {
        CAPTURE(name);
        NeuronProgram p = zoo_program(name);
        std::string once = pretty_print(p);
        std::string twice = pretty_print(parse(once));
        CHECK(once == twice);  // printing is a fixed point after one round
    }
}
