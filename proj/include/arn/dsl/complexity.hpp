#pragma once

#include <map>
#include <string>

#include "arn/dsl/ast.hpp"

namespace arn::dsl {

// Per-node coding model: each DSL symbol has an occurrence probability in
// (0,1]. Probabilities need not sum to one across the table.
using SymbolCost = std::map<std::string, double>;

// The fixed symbol alphabet: node tags, the four builtins, the five
// weight mappings, the eight parameters, bound-variable references and
// the constant-literal class.
const std::vector<std::string>& symbol_alphabet();

// Uniform table assigning probability 1/|alphabet| to every symbol.
const SymbolCost& default_symbol_cost();

// The coding symbol of a single node.
std::string symbol_of(const ExprPtr& e);

// Program size in bits: sum over AST nodes of -log2(P(symbol)).
double complexity(const NeuronProgram& p, const SymbolCost& costs = default_symbol_cost());

}  // namespace arn::dsl
