#include "arn/runtime/tape.hpp"

#include <algorithm>
#include <cassert>

namespace arn::rt {

int Tape::alloc(Op op, int len, int a, int b, int off, int extra) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    n.off = off;
    n.extra = extra;
    n.len = len;
    n.voff = static_cast<int>(val_.size());
    val_.resize(val_.size() + len);
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
}

int Tape::input(std::span<const double> v) {
    int id = alloc(Op::Input, static_cast<int>(v.size()));
    std::copy(v.begin(), v.end(), val_.begin() + nodes_[id].voff);
    return id;
}

int Tape::constant(double c, int len) {
    int id = alloc(Op::Input, len);
    std::fill_n(val_.begin() + nodes_[id].voff, len, c);
    return id;
}

int Tape::param(int off, int len) {
    int id = alloc(Op::Param, len, -1, -1, off);
    const double* p = params_->data() + off;
    std::copy(p, p + len, val_.begin() + nodes_[id].voff);
    return id;
}

int Tape::matvec(int mat_off, int rows, int cols, int vec) {
    assert(nodes_[vec].len == cols);
    int id = alloc(Op::MatVec, rows, vec, -1, mat_off, cols);
    const double* m = params_->data() + mat_off;
    const double* x = val_.data() + nodes_[vec].voff;
    double* y = val_.data() + nodes_[id].voff;
    for (int r = 0; r < rows; ++r) {
        double acc = 0.0;
        const double* row = m + static_cast<size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return id;
}

int Tape::slice(int src, int off, int len) {
    assert(off + len <= nodes_[src].len);
    int id = alloc(Op::Slice, len, src, -1, off);
    const double* s = val_.data() + nodes_[src].voff + off;
    std::copy(s, s + len, val_.begin() + nodes_[id].voff);
    return id;
}

int Tape::binary(Op op, int a, int b) {
    assert(nodes_[a].len == nodes_[b].len);
    int len = nodes_[a].len;
    int id = alloc(op, len, a, b);
    const double* xa = val_.data() + nodes_[a].voff;
    const double* xb = val_.data() + nodes_[b].voff;
    double* y = val_.data() + nodes_[id].voff;
    switch (op) {
        case Op::Add: for (int i = 0; i < len; ++i) y[i] = xa[i] + xb[i]; break;
        case Op::Sub: for (int i = 0; i < len; ++i) y[i] = xa[i] - xb[i]; break;
        case Op::Mul: for (int i = 0; i < len; ++i) y[i] = xa[i] * xb[i]; break;
        case Op::Div: for (int i = 0; i < len; ++i) y[i] = xa[i] / xb[i]; break;
        default: assert(false);
    }
    return id;
}

int Tape::act(dsl::ActFn fn, int a) {
    int len = nodes_[a].len;
    int id = alloc(Op::Act, len, a, -1, 0, static_cast<int>(fn));
    const double* x = val_.data() + nodes_[a].voff;
    double* y = val_.data() + nodes_[id].voff;
    for (int i = 0; i < len; ++i) y[i] = act_eval(fn, x[i]);
    return id;
}

int Tape::sum_sq(int a) {
    int id = alloc(Op::SumSq, 1, a);
    const double* x = val_.data() + nodes_[a].voff;
    double acc = 0.0;
    for (int i = 0; i < nodes_[a].len; ++i) acc += x[i] * x[i];
    val_[nodes_[id].voff] = acc;
    return id;
}

int Tape::log_sum_exp(int a) {
    int id = alloc(Op::LogSumExp, 1, a);
    const double* x = val_.data() + nodes_[a].voff;
    int len = nodes_[a].len;
    double mx = x[0];
    for (int i = 1; i < len; ++i) mx = std::max(mx, x[i]);
    double acc = 0.0;
    for (int i = 0; i < len; ++i) acc += std::exp(x[i] - mx);
    val_[nodes_[id].voff] = mx + std::log(acc);
    return id;
}

void Tape::backward(const std::vector<std::pair<int, double>>& seeds) {
    adj_.assign(val_.size(), 0.0);
    for (const auto& [node, w] : seeds) adj_[nodes_[node].voff] += w;

    for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
        const Node& n = nodes_[id];
        const double* da = adj_.data() + n.voff;
        switch (n.op) {
            case Op::Input:
                break;
            case Op::Param: {
                double* g = grad_->data() + n.off;
                for (int i = 0; i < n.len; ++i) g[i] += da[i];
                break;
            }
            case Op::MatVec: {
                const Node& v = nodes_[n.a];
                const double* x = val_.data() + v.voff;
                const double* m = params_->data() + n.off;
                double* gm = grad_->data() + n.off;
                double* gx = adj_.data() + v.voff;
                int cols = n.extra;
                for (int r = 0; r < n.len; ++r) {
                    double ar = da[r];
                    if (ar == 0.0) continue;
                    const double* row = m + static_cast<size_t>(r) * cols;
                    double* grow = gm + static_cast<size_t>(r) * cols;
                    for (int c = 0; c < cols; ++c) {
                        grow[c] += ar * x[c];
                        gx[c] += row[c] * ar;
                    }
                }
                break;
            }
            case Op::Slice: {
                double* ga = adj_.data() + nodes_[n.a].voff + n.off;
                for (int i = 0; i < n.len; ++i) ga[i] += da[i];
                break;
            }
            case Op::Add: {
                double* ga = adj_.data() + nodes_[n.a].voff;
                double* gb = adj_.data() + nodes_[n.b].voff;
                for (int i = 0; i < n.len; ++i) {
                    ga[i] += da[i];
                    gb[i] += da[i];
                }
                break;
            }
            case Op::Sub: {
                double* ga = adj_.data() + nodes_[n.a].voff;
                double* gb = adj_.data() + nodes_[n.b].voff;
                for (int i = 0; i < n.len; ++i) {
                    ga[i] += da[i];
                    gb[i] -= da[i];
                }
                break;
            }
            case Op::Mul: {
                const double* xa = val_.data() + nodes_[n.a].voff;
                const double* xb = val_.data() + nodes_[n.b].voff;
                double* ga = adj_.data() + nodes_[n.a].voff;
                double* gb = adj_.data() + nodes_[n.b].voff;
                for (int i = 0; i < n.len; ++i) {
                    ga[i] += da[i] * xb[i];
                    gb[i] += da[i] * xa[i];
                }
                break;
            }
            case Op::Div: {
                const double* xa = val_.data() + nodes_[n.a].voff;
                const double* xb = val_.data() + nodes_[n.b].voff;
                double* ga = adj_.data() + nodes_[n.a].voff;
                double* gb = adj_.data() + nodes_[n.b].voff;
                for (int i = 0; i < n.len; ++i) {
                    ga[i] += da[i] / xb[i];
                    gb[i] -= da[i] * xa[i] / (xb[i] * xb[i]);
                }
                break;
            }
            case Op::Act: {
                const double* x = val_.data() + nodes_[n.a].voff;
                const double* y = val_.data() + n.voff;
                double* ga = adj_.data() + nodes_[n.a].voff;
                auto fn = static_cast<dsl::ActFn>(n.extra);
                for (int i = 0; i < n.len; ++i) ga[i] += da[i] * act_grad(fn, x[i], y[i]);
                break;
            }
            case Op::SumSq: {
                const double* x = val_.data() + nodes_[n.a].voff;
                double* ga = adj_.data() + nodes_[n.a].voff;
                double a0 = da[0];
                for (int i = 0; i < nodes_[n.a].len; ++i) ga[i] += 2.0 * x[i] * a0;
                break;
            }
            case Op::LogSumExp: {
                const double* x = val_.data() + nodes_[n.a].voff;
                double lse = val_[n.voff];
                double* ga = adj_.data() + nodes_[n.a].voff;
                double a0 = da[0];
                for (int i = 0; i < nodes_[n.a].len; ++i) ga[i] += a0 * std::exp(x[i] - lse);
                break;
            }
        }
    }
}

}  // namespace arn::rt
