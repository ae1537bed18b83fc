#include "arn/dsl/typecheck.hpp"

#include <vector>

namespace arn::dsl {

namespace {

struct FnSig {
    std::string param;
    Type paramType;
    Type resultType;
};

struct Checker {
    std::unordered_map<const Expr*, Type>& types;
    std::vector<std::pair<std::string, Type>> env;
    std::vector<std::pair<std::string, FnSig>> fns;

    const Type* lookup(const std::string& name) const {
        for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->first == name) return &it->second;
        return nullptr;
    }

    const FnSig* lookup_fn(const std::string& name) const {
        for (auto it = fns.rbegin(); it != fns.rend(); ++it)
            if (it->first == name) return &it->second;
        return nullptr;
    }

    Type record(const ExprPtr& e, Type t) {
        types[e.get()] = t;
        return t;
    }

    Type expect(const ExprPtr& e, Type want, const char* context) {
        Type got = check(e);
        if (got != want)
            throw TypeError(std::string(context) + ": expected " + want.str() + ", found " +
                                got.str(),
                            e->line, e->col);
        return got;
    }

    Type check(const ExprPtr& e) {
        if (e->is<RealConst>()) return record(e, Type::scalar());
        if (auto* v = e->as<Var>()) {
            const Type* t = lookup(v->name);
            if (!t) throw TypeError("unbound variable `" + v->name + "`", e->line, e->col);
            return record(e, *t);
        }
        if (auto* b = e->as<Bin>()) {
            expect(b->lhs, Type::scalar(), "arithmetic operand");
            expect(b->rhs, Type::scalar(), "arithmetic operand");
            return record(e, Type::scalar());
        }
        if (auto* a = e->as<Act>()) {
            expect(a->arg, Type::scalar(), "activation argument");
            return record(e, Type::scalar());
        }
        if (auto* l = e->as<LinCombApply>()) {
            expect(l->list, Type::list(), "lc argument");
            return record(e, Type::scalar());
        }
        if (e->is<BiasEnd>()) return record(e, Type::list());
        if (auto* c = e->as<Cons>()) {
            expect(c->head, Type::scalar(), "cons head");
            expect(c->tail, Type::list(), "cons tail");
            return record(e, Type::list());
        }
        if (auto* c = e->as<Case>()) {
            Type st = check(c->scrutinee);
            size_t nbound = c->pattern.size();
            if (nbound == 1) {
                env.emplace_back(c->pattern[0], st);
            } else {
                if (st.kind != Type::Tuple || st.arity != static_cast<int>(nbound))
                    throw TypeError("pattern of arity " + std::to_string(nbound) +
                                        " does not match scrutinee of type " + st.str(),
                                    e->line, e->col);
                for (const auto& name : c->pattern) env.emplace_back(name, Type::scalar());
            }
            Type bt = check(c->body);
            env.resize(env.size() - nbound);
            return record(e, bt);
        }
        if (auto* l = e->as<LetFun>()) {
            FnSig sig{l->param, Type::scalar(), Type::scalar()};
            // The parameter kind is not annotated in the source; try a
            // scalar parameter first, then a linComb parameter.
            try {
                env.emplace_back(l->param, Type::scalar());
                sig.resultType = check(l->fnBody);
                sig.paramType = Type::scalar();
                env.pop_back();
            } catch (const TypeError&) {
                env.pop_back();
                env.emplace_back(l->param, Type::list());
                sig.resultType = check(l->fnBody);
                sig.paramType = Type::list();
                env.pop_back();
            }
            fns.emplace_back(l->name, sig);
            Type bt = check(l->body);
            fns.pop_back();
            return record(e, bt);
        }
        if (auto* p = e->as<Apply>()) {
            const FnSig* sig = lookup_fn(p->fn);
            if (!sig) throw TypeError("unbound function `" + p->fn + "`", e->line, e->col);
            expect(p->arg, sig->paramType, "function argument");
            return record(e, sig->resultType);
        }
        if (auto* t = e->as<Tuple>()) {
            int n = static_cast<int>(t->elems.size());
            if (n != 2 && n != 5)
                throw TypeError("tuples must have 2 or 5 fields, found " + std::to_string(n),
                                e->line, e->col);
            for (const auto& el : t->elems) expect(el, Type::scalar(), "tuple field");
            return record(e, Type::tuple(n));
        }
        throw TypeError("unsupported expression", e->line, e->col);
    }
};

}  // namespace

TypedProgram typecheck(const NeuronProgram& p) {
    TypedProgram tp;
    tp.program = p;
    Checker checker{tp.types};
    for (const auto& name : param_names())
        checker.env.emplace_back(name, is_list_param(name) ? Type::list() : Type::scalar());
    Type result = checker.check(p.body);
    if (result != Type::tuple(5))
        throw TypeError("program must return a quintuple of scalars, found " + result.str(),
                        p.body->line, p.body->col);
    return tp;
}

}  // namespace arn::dsl
