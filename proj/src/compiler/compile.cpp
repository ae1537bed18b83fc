#include "arn/compiler/compile.hpp"

#include <cstring>
#include <map>
#include <tuple>
#include <variant>

namespace arn::compiler {

using dsl::ActFn;
using dsl::BinOp;
using dsl::Expr;
using dsl::ExprPtr;

namespace {

enum class ListTerm { Bias, Inputs, OtherPeeps, OtherOutputs };

struct ListVal {
    // One entry per cons site, in list order. The Expr* identifies the
    // syntactic cons node so auxiliary weights can be keyed per
    // (mapping, site); the register holds the already-compiled head.
    std::vector<std::pair<const Expr*, int>> heads;
    ListTerm term = ListTerm::Bias;
};

struct TupleVal {
    std::vector<int> regs;
};

using Value = std::variant<int, ListVal, TupleVal>;

struct FnDef {
    std::string param;
    ExprPtr body;
};

struct Compiler {
    const dsl::TypedProgram& tp;
    NeuronKernel kernel;
    std::map<std::tuple<int, int, int, int, std::uint64_t>, int> memo;
    std::map<std::pair<int, const Expr*>, int> aux_ids;  // (mapping, cons site)
    std::vector<std::pair<std::string, Value>> env;
    std::vector<std::pair<std::string, FnDef>> fns;

    int emit(OpCode op, int a = -1, int b = -1, int imm = 0, double value = 0.0) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(value));
        std::memcpy(&bits, &value, sizeof(bits));
        auto key = std::make_tuple(static_cast<int>(op), a, b, imm, bits);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        int reg = static_cast<int>(kernel.code.size());
        kernel.code.push_back({op, a, b, imm, value});
        memo[key] = reg;
        switch (op) {
            case OpCode::State: kernel.state_in[imm] = true; break;
            case OpCode::InputMat: kernel.uses_input_mat = true; break;
            case OpCode::RecurMat: kernel.uses_recur_mat = true; break;
            case OpCode::PeepMat: kernel.uses_peep_mat = true; break;
            default: break;
        }
        return reg;
    }

    const Value* lookup(const std::string& name) const {
        for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->first == name) return &it->second;
        return nullptr;
    }

    const FnDef* lookup_fn(const std::string& name) const {
        for (auto it = fns.rbegin(); it != fns.rend(); ++it)
            if (it->first == name) return &it->second;
        return nullptr;
    }

    int aux_for(int mapping, const Expr* site) {
        auto key = std::make_pair(mapping, site);
        if (auto it = aux_ids.find(key); it != aux_ids.end()) return it->second;
        int id = static_cast<int>(aux_ids.size());
        aux_ids[key] = id;
        return id;
    }

    bool is_list(const ExprPtr& e) const {
        return tp.type_of(e).kind == dsl::Type::List;
    }

    int scalar(const Value& v) const {
        if (auto* r = std::get_if<int>(&v)) return *r;
        throw CompileError("internal: expected scalar value");
    }

    Value compile_value(const ExprPtr& e) {
        if (is_list(e)) return compile_list(e);
        return compile_expr(e);
    }

    Value compile_expr(const ExprPtr& e) {
        if (auto* r = e->as<dsl::RealConst>()) {
            return emit(OpCode::Const, -1, -1, 0, r->value);
        }
        if (auto* v = e->as<dsl::Var>()) {
            if (const Value* bound = lookup(v->name)) return *bound;
            if (v->name == "SelfOutput") return emit(OpCode::Output);
            for (int k = 0; k < 4; ++k)
                if (v->name == "SelfPeep" + std::to_string(k)) return emit(OpCode::State, -1, -1, k);
            throw CompileError("internal: unbound variable `" + v->name + "`");
        }
        if (auto* b = e->as<dsl::Bin>()) {
            int lhs = scalar(compile_expr(b->lhs));
            int rhs = scalar(compile_expr(b->rhs));
            OpCode op = b->op == BinOp::Add   ? OpCode::Add
                        : b->op == BinOp::Sub ? OpCode::Sub
                        : b->op == BinOp::Mul ? OpCode::Mul
                                              : OpCode::Div;
            return emit(op, lhs, rhs);
        }
        if (auto* a = e->as<dsl::Act>()) {
            int arg = scalar(compile_expr(a->arg));
            return emit(OpCode::Act, arg, -1, static_cast<int>(a->fn));
        }
        if (auto* l = e->as<dsl::LinCombApply>()) {
            ListVal lv = compile_list(l->list);
            int acc = emit(OpCode::BiasVec, -1, -1, l->mapping);
            for (const auto& [site, headReg] : lv.heads) {
                int scaled = emit(OpCode::AuxMul, headReg, -1, aux_for(l->mapping, site));
                acc = emit(OpCode::Add, acc, scaled);
            }
            switch (lv.term) {
                case ListTerm::Bias: break;
                case ListTerm::Inputs:
                    acc = emit(OpCode::Add, acc, emit(OpCode::InputMat, -1, -1, l->mapping));
                    break;
                case ListTerm::OtherOutputs:
                    acc = emit(OpCode::Add, acc, emit(OpCode::RecurMat, -1, -1, l->mapping));
                    break;
                case ListTerm::OtherPeeps:
                    acc = emit(OpCode::Add, acc, emit(OpCode::PeepMat, -1, -1, l->mapping));
                    break;
            }
            return acc;
        }
        if (auto* c = e->as<dsl::Case>()) {
            Value sv = compile_value(c->scrutinee);
            size_t nbound = c->pattern.size();
            if (nbound == 1) {
                env.emplace_back(c->pattern[0], sv);
            } else {
                auto* tup = std::get_if<TupleVal>(&sv);
                if (!tup || tup->regs.size() != nbound)
                    throw CompileError("internal: tuple pattern mismatch");
                for (size_t i = 0; i < nbound; ++i) env.emplace_back(c->pattern[i], tup->regs[i]);
            }
            Value body = compile_value(c->body);
            env.resize(env.size() - nbound);
            return body;
        }
        if (auto* l = e->as<dsl::LetFun>()) {
            fns.emplace_back(l->name, FnDef{l->param, l->fnBody});
            Value body = compile_value(l->body);
            fns.pop_back();
            return body;
        }
        if (auto* p = e->as<dsl::Apply>()) {
            const FnDef* fn = lookup_fn(p->fn);
            if (!fn) throw CompileError("internal: unbound function `" + p->fn + "`");
            Value arg = compile_value(p->arg);
            env.emplace_back(fn->param, arg);
            Value result = compile_value(fn->body);
            env.pop_back();
            return result;
        }
        if (auto* t = e->as<dsl::Tuple>()) {
            TupleVal tv;
            for (const auto& el : t->elems) tv.regs.push_back(scalar(compile_expr(el)));
            return tv;
        }
        throw CompileError("internal: unsupported construct reached the compiler");
    }

    ListVal compile_list(const ExprPtr& e) {
        if (e->is<dsl::BiasEnd>()) return {};
        if (auto* v = e->as<dsl::Var>()) {
            if (const Value* bound = lookup(v->name)) {
                if (auto* lv = std::get_if<ListVal>(bound)) return *lv;
                throw CompileError("internal: `" + v->name + "` is not a list");
            }
            if (v->name == "InputsLC") return {{}, ListTerm::Inputs};
            if (v->name == "OtherPeepsLC") return {{}, ListTerm::OtherPeeps};
            if (v->name == "OtherOutputsLC") return {{}, ListTerm::OtherOutputs};
            throw CompileError("internal: unbound list variable `" + v->name + "`");
        }
        if (auto* c = e->as<dsl::Cons>()) {
            int headReg = scalar(compile_expr(c->head));
            ListVal tail = compile_list(c->tail);
            ListVal out;
            out.heads.emplace_back(e.get(), headReg);
            out.heads.insert(out.heads.end(), tail.heads.begin(), tail.heads.end());
            out.term = tail.term;
            return out;
        }
        if (auto* c = e->as<dsl::Case>()) {
            Value sv = compile_value(c->scrutinee);
            size_t nbound = c->pattern.size();
            if (nbound == 1) {
                env.emplace_back(c->pattern[0], sv);
            } else {
                auto* tup = std::get_if<TupleVal>(&sv);
                if (!tup || tup->regs.size() != nbound)
                    throw CompileError("internal: tuple pattern mismatch");
                for (size_t i = 0; i < nbound; ++i) env.emplace_back(c->pattern[i], tup->regs[i]);
            }
            ListVal body = compile_list(c->body);
            env.resize(env.size() - nbound);
            return body;
        }
        if (auto* l = e->as<dsl::LetFun>()) {
            fns.emplace_back(l->name, FnDef{l->param, l->fnBody});
            ListVal body = compile_list(l->body);
            fns.pop_back();
            return body;
        }
        if (auto* p = e->as<dsl::Apply>()) {
            const FnDef* fn = lookup_fn(p->fn);
            if (!fn) throw CompileError("internal: unbound function `" + p->fn + "`");
            Value arg = compile_value(p->arg);
            env.emplace_back(fn->param, arg);
            ListVal result = compile_list(fn->body);
            env.pop_back();
            return result;
        }
        throw CompileError("internal: expression is not a linComb");
    }
};

}  // namespace

NeuronKernel compile(const dsl::TypedProgram& p, int l, int n_in) {
    if (l < 2) throw CompileError("layer needs at least 2 nodes (hollow matrices)");
    if (n_in < 1) throw CompileError("n_in must be at least 1");
    Compiler c{p};
    Value result = c.compile_value(p.program.body);
    auto* tup = std::get_if<TupleVal>(&result);
    if (!tup || tup->regs.size() != 5)
        throw CompileError("internal: program did not produce a quintuple");
    for (int k = 0; k < 4; ++k) c.kernel.state_out[k] = tup->regs[k];
    c.kernel.output_out = tup->regs[4];
    c.kernel.layout = WeightLayout::make(l, n_in, static_cast<int>(c.aux_ids.size()));
    return std::move(c.kernel);
}

}  // namespace arn::compiler
