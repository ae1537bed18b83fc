#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace arn::dsl {

enum class BinOp { Add, Sub, Mul, Div };
enum class ActFn { Tanh, Relu, Srelu, Sigmoid };

inline const char* to_string(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
    }
    return "?";
}

inline const char* to_string(ActFn fn) {
    switch (fn) {
        case ActFn::Tanh: return "tanh";
        case ActFn::Relu: return "relu";
        case ActFn::Srelu: return "srelu";
        case ActFn::Sigmoid: return "sigmoid";
    }
    return "?";
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Numeric literal. `lexeme` keeps the source spelling (SML style, `~` for
// minus) so printing round-trips exactly; empty for synthesized constants.
struct RealConst {
    double value = 0.0;
    std::string lexeme;
};

struct Var {
    std::string name;
};

struct Bin {
    BinOp op;
    ExprPtr lhs, rhs;
};

struct Act {
    ActFn fn;
    ExprPtr arg;
};

// lcI( list ): apply weight mapping `mapping` to a linComb value.
struct LinCombApply {
    int mapping = 0;  // 0..4
    ExprPtr list;
};

// linComb constructors. Lists are ordinary expressions here; the type
// checker enforces that they only appear where a linComb is expected.
struct BiasEnd {};

struct Cons {
    ExprPtr head;  // scalar
    ExprPtr tail;  // list
};

// case scrutinee of pattern => body. A one-element pattern binds a single
// variable (scalar or list); longer patterns destructure a tuple.
struct Case {
    ExprPtr scrutinee;
    std::vector<std::string> pattern;
    ExprPtr body;
};

// let fun name param = fnBody in body end   (unary functions only)
struct LetFun {
    std::string name;
    std::string param;
    ExprPtr fnBody;
    ExprPtr body;
};

struct Apply {
    std::string fn;
    ExprPtr arg;
};

struct Tuple {
    std::vector<ExprPtr> elems;
};

struct Expr {
    std::variant<RealConst, Var, Bin, Act, LinCombApply, BiasEnd, Cons, Case, LetFun, Apply, Tuple> node;
    int line = 0;
    int col = 0;

    template <class T>
    const T* as() const {
        return std::get_if<T>(&node);
    }
    template <class T>
    bool is() const {
        return std::holds_alternative<T>(node);
    }
};

template <class T>
ExprPtr make_expr(T node, int line = 0, int col = 0) {
    auto e = std::make_shared<Expr>();
    e->node = std::move(node);
    e->line = line;
    e->col = col;
    return e;
}

// The eight parameters in the order the programs declare them.
inline const std::array<std::string, 8>& param_names() {
    static const std::array<std::string, 8> names = {
        "SelfPeep0", "SelfPeep1", "SelfPeep2", "SelfPeep3",
        "SelfOutput", "OtherPeepsLC", "OtherOutputsLC", "InputsLC"};
    return names;
}

inline bool is_list_param(const std::string& name) {
    return name == "InputsLC" || name == "OtherPeepsLC" || name == "OtherOutputsLC";
}

struct NeuronProgram {
    std::string name = "f";
    ExprPtr body;
};

bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const NeuronProgram& a, const NeuronProgram& b);

// Total number of AST nodes in the body.
int node_count(const ExprPtr& e);

// Depth-first visit of every node.
void visit(const ExprPtr& e, const std::function<void(const ExprPtr&)>& fn);

}  // namespace arn::dsl
