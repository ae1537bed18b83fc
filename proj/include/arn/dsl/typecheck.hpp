#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>

#include "arn/dsl/ast.hpp"

namespace arn::dsl {

struct TypeError : std::runtime_error {
    int line, col;
    TypeError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
          line(line_),
          col(col_) {}
};

struct Type {
    enum Kind { Scalar, List, Tuple } kind = Scalar;
    int arity = 0;  // Tuple only

    bool operator==(const Type&) const = default;

    static Type scalar() { return {Scalar, 0}; }
    static Type list() { return {List, 0}; }
    static Type tuple(int n) { return {Tuple, n}; }

    std::string str() const {
        switch (kind) {
            case Scalar: return "scalar";
            case List: return "linComb";
            case Tuple: return "tuple(" + std::to_string(arity) + ")";
        }
        return "?";
    }
};

// Program plus the inferred type of every subexpression.
struct TypedProgram {
    NeuronProgram program;
    std::unordered_map<const Expr*, Type> types;

    Type type_of(const ExprPtr& e) const { return types.at(e.get()); }
};

// Checks that the program is closed, that every operator is applied to
// operands of the right kind, and that the result is a quintuple of
// scalars. Throws TypeError otherwise.
TypedProgram typecheck(const NeuronProgram& p);

}  // namespace arn::dsl
