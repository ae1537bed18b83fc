#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "arn/dsl/ast.hpp"

namespace arn::rt {

inline double act_eval(dsl::ActFn fn, double x) {
    switch (fn) {
        case dsl::ActFn::Tanh: return std::tanh(x);
        case dsl::ActFn::Relu: return x > 0.0 ? x : 0.0;
        case dsl::ActFn::Srelu: return x > 1.0 ? 1.0 : (x < -1.0 ? -1.0 : x);
        case dsl::ActFn::Sigmoid: return (std::tanh(0.5 * x) + 1.0) * 0.5;
    }
    return 0.0;
}

// Subgradient convention: 0 at the relu kink and at the srelu corners.
inline double act_grad(dsl::ActFn fn, double x, double y) {
    switch (fn) {
        case dsl::ActFn::Tanh: return 1.0 - y * y;
        case dsl::ActFn::Relu: return x > 0.0 ? 1.0 : 0.0;
        case dsl::ActFn::Srelu: return (x > -1.0 && x < 1.0) ? 1.0 : 0.0;
        case dsl::ActFn::Sigmoid: return y * (1.0 - y);
    }
    return 0.0;
}

// Record-and-replay reverse-mode tape over vector values. Values are
// computed eagerly as nodes are recorded; backward() replays the record
// in exact reverse order. Parameters live in an external flat vector and
// gradients accumulate into a parallel flat vector.
class Tape {
  public:
    enum class Op : std::uint8_t {
        Input,   // constant vector, no gradient
        Param,   // view of params[off .. off+len)
        MatVec,  // params matrix (off, extra=cols) times node a
        Slice,   // node a, range [off, off+len)
        Add, Sub, Mul, Div,
        Act,     // activation extra applied to node a
        SumSq,   // sum_i a_i^2, length 1
        LogSumExp,  // log sum_i exp(a_i), length 1
    };

    struct Node {
        Op op;
        int a = -1, b = -1;
        int off = 0;    // param offset / slice offset
        int extra = 0;  // matvec cols / activation id
        int voff = 0;   // value arena offset
        int len = 0;
    };

    void bind(const std::vector<double>* params, std::vector<double>* grad) {
        params_ = params;
        grad_ = grad;
    }

    void reset() {
        nodes_.clear();
        val_.clear();
    }

    int size() const { return static_cast<int>(nodes_.size()); }

    std::span<const double> value(int id) const {
        const Node& n = nodes_[id];
        return {val_.data() + n.voff, static_cast<size_t>(n.len)};
    }

    double scalar(int id) const { return value(id)[0]; }

    int input(std::span<const double> v);
    int constant(double c, int len);
    int param(int off, int len);
    int matvec(int mat_off, int rows, int cols, int vec);
    int slice(int src, int off, int len);
    int add(int a, int b) { return binary(Op::Add, a, b); }
    int sub(int a, int b) { return binary(Op::Sub, a, b); }
    int mul(int a, int b) { return binary(Op::Mul, a, b); }
    int div(int a, int b) { return binary(Op::Div, a, b); }
    int act(dsl::ActFn fn, int a);
    int sum_sq(int a);
    int log_sum_exp(int a);

    // Reverse sweep seeding d(loss)/d(node) for each (node, weight) pair;
    // adds parameter adjoints into the bound gradient vector.
    void backward(const std::vector<std::pair<int, double>>& seeds);

  private:
    int alloc(Op op, int len, int a = -1, int b = -1, int off = 0, int extra = 0);
    int binary(Op op, int a, int b);

    std::vector<Node> nodes_;
    std::vector<double> val_;
    std::vector<double> adj_;
    const std::vector<double>* params_ = nullptr;
    std::vector<double>* grad_ = nullptr;
};

}  // namespace arn::rt
