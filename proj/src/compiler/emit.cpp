#include <sstream>
#include <vector>

#include "arn/compiler/compile.hpp"
#include "arn/dsl/parser.hpp"

namespace arn::compiler {

namespace {

// Expression precedence for the readable listing.
enum Prec { PAdd = 1, PMul = 2, PAtom = 3 };

struct ReadableEmitter {
    const NeuronKernel& k;
    std::vector<int> useCount;
    std::vector<std::string> name;  // empty = anonymous, inlinable

    explicit ReadableEmitter(const NeuronKernel& kernel)
        : k(kernel), useCount(kernel.code.size(), 0), name(kernel.code.size()) {
        for (const auto& in : k.code) {
            if (in.a >= 0) ++useCount[in.a];
            if (in.b >= 0) ++useCount[in.b];
        }
        // Lowest state index wins when several results share a register.
        for (int s = 3; s >= 0; --s) name[k.state_out[s]] = "s" + std::to_string(s);
        if (name[k.output_out].empty()) name[k.output_out] = "y";
    }

    bool inlined(int reg) const {
        if (!name[reg].empty()) return false;
        const auto& in = k.code[reg];
        // Leaf reads always render inline; other single-use registers are
        // folded into their consumer.
        switch (in.op) {
            case OpCode::Const:
            case OpCode::State:
            case OpCode::Output:
            case OpCode::InputMat:
            case OpCode::RecurMat:
            case OpCode::PeepMat:
            case OpCode::BiasVec:
                return true;
            default:
                return useCount[reg] <= 1;
        }
    }

    std::string ref(int reg, int contextPrec) const {
        if (!inlined(reg)) {
            if (!name[reg].empty()) return name[reg];
            return "r" + std::to_string(reg);
        }
        return render(reg, contextPrec);
    }

    std::string render(int reg, int contextPrec) const {
        const auto& in = k.code[reg];
        std::string s;
        int prec = PAtom;
        switch (in.op) {
            case OpCode::Const: s = dsl::format_real_c(in.value); break;
            case OpCode::State: s = "s" + std::to_string(in.imm) + "_prev"; break;
            case OpCode::Output: s = "y_prev"; break;
            case OpCode::InputMat: s = "U" + std::to_string(in.imm) + "*x"; prec = PMul; break;
            case OpCode::RecurMat: s = "W" + std::to_string(in.imm) + "*y_prev"; prec = PMul; break;
            case OpCode::PeepMat: s = "P" + std::to_string(in.imm) + "*s0_prev"; prec = PMul; break;
            case OpCode::BiasVec: s = "b" + std::to_string(in.imm); break;
            case OpCode::AuxMul:
                s = "a" + std::to_string(in.imm) + "*" + ref(in.a, PMul + 1);
                prec = PMul;
                break;
            case OpCode::Add: s = ref(in.a, PAdd) + " + " + ref(in.b, PAdd + 1); prec = PAdd; break;
            case OpCode::Sub: s = ref(in.a, PAdd) + " - " + ref(in.b, PAdd + 1); prec = PAdd; break;
            case OpCode::Mul: s = ref(in.a, PMul) + " * " + ref(in.b, PMul + 1); prec = PMul; break;
            case OpCode::Div: s = ref(in.a, PMul) + " / " + ref(in.b, PMul + 1); prec = PMul; break;
            case OpCode::Act:
                s = std::string(dsl::to_string(static_cast<dsl::ActFn>(in.imm))) + "(" +
                    ref(in.a, 0) + ")";
                break;
        }
        if (prec < contextPrec) return "(" + s + ")";
        return s;
    }

    std::string run() const {
        std::ostringstream out;
        for (int reg = 0; reg < k.register_count(); ++reg) {
            if (inlined(reg)) continue;
            std::string lhs = name[reg].empty() ? "r" + std::to_string(reg) : name[reg];
            out << lhs << " = " << render(reg, 0) << ";\n";
        }
        for (int s = 0; s < 4; ++s) {
            std::string role = "s" + std::to_string(s);
            if (name[k.state_out[s]] != role) out << role << " = " << name[k.state_out[s]] << ";\n";
        }
        if (name[k.output_out] != "y") out << "y = " << name[k.output_out] << ";\n";
        return out.str();
    }
};

const char* op_name(OpCode op) {
    switch (op) {
        case OpCode::Const: return "const";
        case OpCode::State: return "state";
        case OpCode::Output: return "output";
        case OpCode::InputMat: return "input_mat";
        case OpCode::RecurMat: return "recur_mat";
        case OpCode::PeepMat: return "peep_mat";
        case OpCode::BiasVec: return "bias_vec";
        case OpCode::AuxMul: return "aux_mul";
        case OpCode::Add: return "add";
        case OpCode::Sub: return "sub";
        case OpCode::Mul: return "mul";
        case OpCode::Div: return "div";
        case OpCode::Act: return "act";
    }
    return "?";
}

}  // namespace

std::string emit_readable(const NeuronKernel& k) { return ReadableEmitter(k).run(); }

std::string emit_graph(const NeuronKernel& k) {
    std::ostringstream out;
    for (int reg = 0; reg < k.register_count(); ++reg) {
        const auto& in = k.code[reg];
        out << "node " << reg << ' ' << op_name(in.op);
        switch (in.op) {
            case OpCode::Const: out << ' ' << dsl::format_real_c(in.value); break;
            case OpCode::State:
            case OpCode::InputMat:
            case OpCode::RecurMat:
            case OpCode::PeepMat:
            case OpCode::BiasVec:
            case OpCode::AuxMul:
                out << ' ' << in.imm;
                break;
            case OpCode::Act: out << ' ' << dsl::to_string(static_cast<dsl::ActFn>(in.imm)); break;
            default: break;
        }
        out << '\n';
    }
    for (int reg = 0; reg < k.register_count(); ++reg) {
        const auto& in = k.code[reg];
        if (in.a >= 0) out << "edge " << in.a << ' ' << reg << '\n';
        if (in.b >= 0) out << "edge " << in.b << ' ' << reg << '\n';
    }
    for (int s = 0; s < 4; ++s) out << "result s" << s << ' ' << k.state_out[s] << '\n';
    out << "result y " << k.output_out << '\n';
    return out.str();
}

}  // namespace arn::compiler
