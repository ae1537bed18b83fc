#pragma once

#include <string>

#include "arn/dsl/ast.hpp"

namespace arn::dsl {

// Print a program in the surface syntax. The output always carries the
// full `fun f ( ... ) =` header and re-parses to an identical AST.
std::string pretty_print(const NeuronProgram& p);

std::string pretty_print(const ExprPtr& e);

}  // namespace arn::dsl
