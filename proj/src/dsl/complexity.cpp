#include "arn/dsl/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arn::dsl {

const std::vector<std::string>& symbol_alphabet() {
    static const std::vector<std::string> alphabet = [] {
        std::vector<std::string> a = {"const", "var",  "cons",  "bias",    "case",
                                      "let",   "apply", "tuple", "+",       "-",
                                      "*",     "/",    "tanh",  "relu",    "srelu",
                                      "sigmoid"};
        for (int i = 0; i < 5; ++i) a.push_back("lc" + std::to_string(i));
        for (const auto& p : param_names()) a.push_back(p);
        return a;
    }();
    return alphabet;
}

const SymbolCost& default_symbol_cost() {
    static const SymbolCost table = [] {
        SymbolCost t;
        const auto& alphabet = symbol_alphabet();
        double p = 1.0 / static_cast<double>(alphabet.size());
        for (const auto& s : alphabet) t[s] = p;
        return t;
    }();
    return table;
}

std::string symbol_of(const ExprPtr& e) {
    if (e->is<RealConst>()) return "const";
    if (auto* v = e->as<Var>()) {
        const auto& params = param_names();
        if (std::find(params.begin(), params.end(), v->name) != params.end()) return v->name;
        return "var";
    }
    if (auto* b = e->as<Bin>()) return to_string(b->op);
    if (auto* a = e->as<Act>()) return to_string(a->fn);
    if (auto* l = e->as<LinCombApply>()) return "lc" + std::to_string(l->mapping);
    if (e->is<BiasEnd>()) return "bias";
    if (e->is<Cons>()) return "cons";
    if (e->is<Case>()) return "case";
    if (e->is<LetFun>()) return "let";
    if (e->is<Apply>()) return "apply";
    if (e->is<Tuple>()) return "tuple";
    throw std::logic_error("unknown node kind");
}

double complexity(const NeuronProgram& p, const SymbolCost& costs) {
    double bits = 0.0;
    visit(p.body, [&](const ExprPtr& e) {
        std::string sym = symbol_of(e);
        auto it = costs.find(sym);
        if (it == costs.end())
            throw std::out_of_range("symbol `" + sym + "` missing from cost table");
        if (it->second <= 0.0)
            throw std::out_of_range("symbol `" + sym + "` has non-positive probability");
        bits -= std::log2(it->second);
    });
    return bits;
}

}  // namespace arn::dsl
