#pragma once

#include <stdexcept>

#include "arn/compiler/kernel.hpp"
#include "arn/dsl/typecheck.hpp"

namespace arn::compiler {

struct CompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lower a type-checked program to register bytecode plus the five-mapping
// weight layout. `l` is the node count of the layer, `n_in` the input
// width; l >= 2 so the hollow matrices are meaningful.
NeuronKernel compile(const dsl::TypedProgram& p, int l, int n_in);

// C-like listing, one line per named register; deterministic.
std::string emit_readable(const NeuronKernel& k);

// Plain-text directed graph: one `node` line per instruction, one `edge`
// line per operand reference; deterministic.
std::string emit_graph(const NeuronKernel& k);

}  // namespace arn::compiler
