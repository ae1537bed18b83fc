#include "arn/dsl/ast.hpp"

namespace arn::dsl {

bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    if (auto* ra = a->as<RealConst>()) {
        return ra->value == b->as<RealConst>()->value;
    }
    if (auto* va = a->as<Var>()) {
        return va->name == b->as<Var>()->name;
    }
    if (auto* ba = a->as<Bin>()) {
        auto* bb = b->as<Bin>();
        return ba->op == bb->op && equal(ba->lhs, bb->lhs) && equal(ba->rhs, bb->rhs);
    }
    if (auto* aa = a->as<Act>()) {
        auto* ab = b->as<Act>();
        return aa->fn == ab->fn && equal(aa->arg, ab->arg);
    }
    if (auto* la = a->as<LinCombApply>()) {
        auto* lb = b->as<LinCombApply>();
        return la->mapping == lb->mapping && equal(la->list, lb->list);
    }
    if (a->is<BiasEnd>()) return true;
    if (auto* ca = a->as<Cons>()) {
        auto* cb = b->as<Cons>();
        return equal(ca->head, cb->head) && equal(ca->tail, cb->tail);
    }
    if (auto* ca = a->as<Case>()) {
        auto* cb = b->as<Case>();
        return ca->pattern == cb->pattern && equal(ca->scrutinee, cb->scrutinee) &&
               equal(ca->body, cb->body);
    }
    if (auto* la = a->as<LetFun>()) {
        auto* lb = b->as<LetFun>();
        return la->name == lb->name && la->param == lb->param &&
               equal(la->fnBody, lb->fnBody) && equal(la->body, lb->body);
    }
    if (auto* pa = a->as<Apply>()) {
        auto* pb = b->as<Apply>();
        return pa->fn == pb->fn && equal(pa->arg, pb->arg);
    }
    if (auto* ta = a->as<Tuple>()) {
        auto* tb = b->as<Tuple>();
        if (ta->elems.size() != tb->elems.size()) return false;
        for (size_t i = 0; i < ta->elems.size(); ++i)
            if (!equal(ta->elems[i], tb->elems[i])) return false;
        return true;
    }
    return false;
}

bool equal(const NeuronProgram& a, const NeuronProgram& b) {
    return equal(a.body, b.body);
}

void visit(const ExprPtr& e, const std::function<void(const ExprPtr&)>& fn) {
    if (!e) return;
    fn(e);
    if (auto* b = e->as<Bin>()) {
        visit(b->lhs, fn);
        visit(b->rhs, fn);
    } else if (auto* a = e->as<Act>()) {
        visit(a->arg, fn);
    } else if (auto* l = e->as<LinCombApply>()) {
        visit(l->list, fn);
    } else if (auto* c = e->as<Cons>()) {
        visit(c->head, fn);
        visit(c->tail, fn);
    } else if (auto* c = e->as<Case>()) {
        visit(c->scrutinee, fn);
        visit(c->body, fn);
    } else if (auto* l = e->as<LetFun>()) {
        visit(l->fnBody, fn);
        visit(l->body, fn);
    } else if (auto* p = e->as<Apply>()) {
        visit(p->arg, fn);
    } else if (auto* t = e->as<Tuple>()) {
        for (auto& el : t->elems) visit(el, fn);
    }
}

int node_count(const ExprPtr& e) {
    int n = 0;
    visit(e, [&](const ExprPtr&) { ++n; });
    return n;
}

}  // namespace arn::dsl
