#include "arn/dsl/pretty.hpp"

#include <sstream>

#include "arn/dsl/parser.hpp"

namespace arn::dsl {

namespace {

struct Printer {
    std::ostringstream out;
    int indent = 0;

    void nl() {
        out << '\n';
        for (int i = 0; i < indent; ++i) out << "  ";
    }

    void print(const ExprPtr& e) {
        if (auto* r = e->as<RealConst>()) {
            out << (r->lexeme.empty() ? format_real(r->value) : r->lexeme);
        } else if (auto* v = e->as<Var>()) {
            out << v->name;
        } else if (auto* b = e->as<Bin>()) {
            out << "( ";
            print(b->lhs);
            out << ' ' << to_string(b->op) << ' ';
            print(b->rhs);
            out << " )";
        } else if (auto* a = e->as<Act>()) {
            out << to_string(a->fn) << "( ";
            print(a->arg);
            out << " )";
        } else if (auto* l = e->as<LinCombApply>()) {
            out << "lc" << l->mapping << "( ";
            print(l->list);
            out << " )";
        } else if (e->is<BiasEnd>()) {
            out << "bias";
        } else if (auto* c = e->as<Cons>()) {
            out << "cons( ";
            print(c->head);
            out << ", ";
            print(c->tail);
            out << " )";
        } else if (auto* c = e->as<Case>()) {
            out << "( case ";
            print(c->scrutinee);
            out << " of";
            ++indent;
            nl();
            if (c->pattern.size() == 1) {
                out << c->pattern[0];
            } else {
                out << "( ";
                for (size_t i = 0; i < c->pattern.size(); ++i) {
                    if (i) out << ", ";
                    out << c->pattern[i];
                }
                out << " )";
            }
            out << " =>";
            nl();
            print(c->body);
            --indent;
            out << " )";
        } else if (auto* l = e->as<LetFun>()) {
            out << "( let fun " << l->name << ' ' << l->param << " =";
            ++indent;
            nl();
            print(l->fnBody);
            --indent;
            nl();
            out << "in";
            ++indent;
            nl();
            print(l->body);
            --indent;
            nl();
            out << "end )";
        } else if (auto* p = e->as<Apply>()) {
            out << p->fn << "( ";
            print(p->arg);
            out << " )";
        } else if (auto* t = e->as<Tuple>()) {
            out << "( ";
            for (size_t i = 0; i < t->elems.size(); ++i) {
                if (i) out << ", ";
                print(t->elems[i]);
            }
            out << " )";
        }
    }
};

}  // namespace

std::string pretty_print(const ExprPtr& e) {
    Printer p;
    p.print(e);
    return p.out.str();
}

std::string pretty_print(const NeuronProgram& p) {
    std::ostringstream out;
    out << "fun " << p.name << " (";
    const auto& names = param_names();
    for (size_t i = 0; i < names.size(); ++i) out << (i ? ", " : " ") << names[i];
    out << " ) =\n  ";
    Printer body;
    body.indent = 1;
    body.print(p.body);
    out << body.out.str() << '\n';
    return out.str();
}

}  // namespace arn::dsl
