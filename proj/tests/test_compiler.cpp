#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "arn/compiler/compile.hpp"
#include "arn/dsl/parser.hpp"
#include "arn/dsl/zoo.hpp"
#include "arn/runtime/executor.hpp"
#include "arn/runtime/tape.hpp"

using namespace arn;

namespace {

compiler::NeuronKernel compile_src(const std::string& src, int l, int n_in) {
    return compiler::compile(dsl::typecheck(dsl::parse(src)), l, n_in);
}

// One kernel step with explicit previous state/output and input, fully
// random parameter block; returns (s0'..s3', y') as l-vectors.
struct StepResult {
    std::vector<std::vector<double>> s;
    std::vector<double> y;
};

StepResult run_step(const compiler::NeuronKernel& k, const std::vector<double>& params,
                    const std::vector<std::vector<double>>& s_prev,
                    const std::vector<double>& y_prev, const std::vector<double>& x) {
    rt::Tape tape;
    tape.bind(&params, nullptr);
    rt::KernelSession session(k, tape, 0);
    rt::KernelSession::StepState st;
    for (int i = 0; i < 4; ++i) st.s[i] = tape.input(s_prev[i]);
    st.y = tape.input(y_prev);
    int xn = tape.input(x);
    auto out = session.step(st, xn);
    StepResult r;
    for (int i = 0; i < 4; ++i)
        r.s.emplace_back(tape.value(out.s[i]).begin(), tape.value(out.s[i]).end());
    r.y.assign(tape.value(out.y).begin(), tape.value(out.y).end());
    return r;
}

std::vector<double> random_vec(size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

// oracle-side helpers over the flat layout, computed independently of
// WeightLayout's accessors
struct Off {
    int l, n_in;
    int u(int m) const { return m * l * n_in; }
    int w(int m) const { return 5 * l * n_in + m * l * l; }
    int p(int m) const { return 5 * l * n_in + 5 * l * l + m * l * l; }
    int b(int m) const { return 5 * l * n_in + 10 * l * l + m * l; }
    int aux(int a) const { return 5 * l * n_in + 10 * l * l + 5 * l + a * l; }
};

std::vector<double> matvec(const std::vector<double>& p, int off, int rows, int cols,
                           const std::vector<double>& v) {
    std::vector<double> out(rows, 0.0);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out[r] += p[off + r * cols + c] * v[c];
    return out;
}

}  // namespace

TEST_CASE("weight layout arithmetic and hollow diagonal indices") {
    auto lay = compiler::WeightLayout::make(8, 3, 2);
    CHECK(lay.u_off == 0);
    CHECK(lay.w_off == 5 * 8 * 3);
    CHECK(lay.p_off == lay.w_off + 5 * 64);
    CHECK(lay.b_off == lay.p_off + 5 * 64);
    CHECK(lay.aux_off == lay.b_off + 40);
    CHECK(lay.size == lay.aux_off + 16);

    auto idx = lay.hollow_indices();
    CHECK(idx.size() == 2u * 5u * 8u);
    // every index points at a diagonal element of some l x l block
    for (int i : idx) {
        int rel = i < lay.p_off ? i - lay.w_off : i - lay.p_off;
        int row = rel / 8, col = rel % 8;
        CHECK(row % 8 == col);
    }
    CHECK(std::set<int>(idx.begin(), idx.end()).size() == idx.size());
}

TEST_CASE("readable output of the small pendulum neuron") {
    auto k = compile_src(dsl::zoo_source("pendulum-small"), 4, 2);
    std::string text = compiler::emit_readable(k);
    std::string squashed;
    for (char c : text)
        if (c != ' ') squashed += c;
    CHECK(squashed.find("y=s0-s0*s0") != std::string::npos);
    // emitters are deterministic
    CHECK(text == compiler::emit_readable(k));
}

TEST_CASE("graph output shape") {
    auto k = compile_src(dsl::zoo_source("rnn-min"), 4, 2);
    std::string g = compiler::emit_graph(k);
    CHECK(g.find("node 0") != std::string::npos);
    CHECK(g.find("edge ") != std::string::npos);
    CHECK(g.find("result y ") != std::string::npos);
    CHECK(g == compiler::emit_graph(k));
}

TEST_CASE("layer width below two is rejected") {
    CHECK_THROWS_AS(compile_src("( 0.0, 0.0, 0.0, 0.0, lc0 InputsLC )", 1, 2),
                    compiler::CompileError);
}

TEST_CASE("lc over the input list lowers to b + U x") {
    const int l = 3, n_in = 2;
    auto k = compile_src("( SelfPeep0, SelfPeep1, SelfPeep2, SelfPeep3, lc0 InputsLC )", l, n_in);
    CHECK(k.uses_input_mat);
    CHECK(!k.uses_recur_mat);
    CHECK(!k.uses_peep_mat);

    std::mt19937_64 rng(11);
    std::vector<double> params = random_vec(k.layout.size, rng);
    std::vector<std::vector<double>> s_prev;
    for (int i = 0; i < 4; ++i) s_prev.push_back(random_vec(l, rng));
    auto y_prev = random_vec(l, rng);
    auto x = random_vec(n_in, rng);
    auto r = run_step(k, params, s_prev, y_prev, x);

    Off off{l, n_in};
    auto expect = matvec(params, off.u(0), l, n_in, x);
    for (int j = 0; j < l; ++j) expect[j] += params[off.b(0) + j];
    for (int j = 0; j < l; ++j) {
        CHECK(r.y[j] == doctest::Approx(expect[j]).epsilon(1e-14));
        // state passthrough
        for (int i = 0; i < 4; ++i) CHECK(r.s[i][j] == s_prev[i][j]);
    }
}

TEST_CASE("cons heads multiply by auxiliary vectors; list terminus adds the stack matvec") {
    const int l = 4, n_in = 3;
    auto k = compile_src(
        "( SelfPeep0, SelfPeep1, SelfPeep2, SelfPeep3, "
        "lc1( cons( SelfOutput, OtherOutputsLC ) ) )",
        l, n_in);
    CHECK(k.layout.aux_count == 1);
    CHECK(k.uses_recur_mat);

    std::mt19937_64 rng(12);
    std::vector<double> params = random_vec(k.layout.size, rng);
    std::vector<std::vector<double>> s_prev;
    for (int i = 0; i < 4; ++i) s_prev.push_back(random_vec(l, rng));
    auto y_prev = random_vec(l, rng);
    auto x = random_vec(n_in, rng);
    auto r = run_step(k, params, s_prev, y_prev, x);

    Off off{l, n_in};
    auto expect = matvec(params, off.w(1), l, l, y_prev);
    for (int j = 0; j < l; ++j)
        expect[j] += params[off.b(1) + j] + params[off.aux(0) + j] * y_prev[j];
    for (int j = 0; j < l; ++j) CHECK(r.y[j] == doctest::Approx(expect[j]).epsilon(1e-14));
}

TEST_CASE("applying the same mapping twice adds its bias twice") {
    const int l = 2, n_in = 2;
    auto k = compile_src(
        "( SelfPeep0, SelfPeep1, SelfPeep2, SelfPeep3, lc0 InputsLC + lc0 InputsLC )", l, n_in);
    std::mt19937_64 rng(13);
    std::vector<double> params = random_vec(k.layout.size, rng);
    std::vector<std::vector<double>> s_prev;
    for (int i = 0; i < 4; ++i) s_prev.push_back(random_vec(l, rng));
    auto y_prev = random_vec(l, rng);
    auto x = random_vec(n_in, rng);
    auto r = run_step(k, params, s_prev, y_prev, x);

    Off off{l, n_in};
    auto ux = matvec(params, off.u(0), l, n_in, x);
    for (int j = 0; j < l; ++j)
        CHECK(r.y[j] == doctest::Approx(2.0 * (ux[j] + params[off.b(0) + j])).epsilon(1e-14));
}

TEST_CASE("peep terminus lowers to the P stack applied to s0") {
    const int l = 3, n_in = 2;
    auto k = compile_src("( SelfPeep0, SelfPeep1, SelfPeep2, SelfPeep3, lc4 OtherPeepsLC )", l,
                         n_in);
    CHECK(k.uses_peep_mat);
    std::mt19937_64 rng(14);
    std::vector<double> params = random_vec(k.layout.size, rng);
    std::vector<std::vector<double>> s_prev;
    for (int i = 0; i < 4; ++i) s_prev.push_back(random_vec(l, rng));
    auto y_prev = random_vec(l, rng);
    auto x = random_vec(n_in, rng);
    auto r = run_step(k, params, s_prev, y_prev, x);

    Off off{l, n_in};
    auto expect = matvec(params, off.p(4), l, l, s_prev[0]);
    for (int j = 0; j < l; ++j)
        CHECK(r.y[j] == doctest::Approx(expect[j] + params[off.b(4) + j]).epsilon(1e-14));
}

TEST_CASE("helper functions are inlined at call sites") {
    const int l = 2, n_in = 2;
    auto direct = compile_src(
        "( 0.0, 0.0, 0.0, 0.0, tanh( lc0 InputsLC ) * tanh( lc0 InputsLC ) )", l, n_in);
    auto via_fun = compile_src(
        "let fun g X = X * X in ( 0.0, 0.0, 0.0, 0.0, g( tanh( lc0 InputsLC ) ) ) end", l, n_in);
    std::mt19937_64 rng(15);
    std::vector<double> params = random_vec(direct.layout.size, rng);
    REQUIRE(via_fun.layout.size == direct.layout.size);
    std::vector<std::vector<double>> s_prev(4, std::vector<double>(l, 0.0));
    std::vector<double> y_prev(l, 0.0);
    auto x = random_vec(n_in, rng);
    auto a = run_step(direct, params, s_prev, y_prev, x);
    auto b = run_step(via_fun, params, s_prev, y_prev, x);
    for (int j = 0; j < l; ++j) CHECK(a.y[j] == doctest::Approx(b.y[j]).epsilon(1e-15));
}

TEST_CASE("the LSTM kernel allocates one auxiliary vector per cons site") {
    auto k = compile_src(dsl::zoo_source("lstm"), 3, 2);
    // hand count over Fig. 1: Z has 1 head, I 2, F 2, O 2
    CHECK(k.layout.aux_count == 7);
    CHECK(k.uses_input_mat);
    CHECK(k.uses_recur_mat);
    CHECK(!k.uses_peep_mat);  // peepholes go through aux, not the P stack
}

TEST_CASE("all zoo programs compile at several widths") {
    for (const auto& name : dsl::zoo_names())
        for (int l : {2, 4, 16}) {
            CAPTURE(name);
            CAPTURE(l);
            CHECK_NOTHROW(compile_src(dsl::zoo_source(name), l, 3));
        }
}
