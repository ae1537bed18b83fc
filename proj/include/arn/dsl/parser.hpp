#pragma once

#include <stdexcept>
#include <string>

#include "arn/dsl/ast.hpp"

namespace arn::dsl {

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
          line(line_),
          col(col_) {}
};

// Parse a neuron program. Accepts either a full
//   fun f ( SelfPeep0, ..., InputsLC ) = body
// declaration or a bare body expression with the standard parameters
// implied.
NeuronProgram parse(const std::string& source);

// Format a double the way the programs spell constants: `~` for minus,
// `E~d` exponents, always with a decimal point.
std::string format_real(double v);

// Plain C-style spelling of a double (round-trip precision).
std::string format_real_c(double v);

}  // namespace arn::dsl
