#include "arn/runtime/executor.hpp"

namespace arn::rt {

using compiler::kMappings;
using compiler::OpCode;

void KernelSession::invalidate_cache() {
    consts_.clear();
    bias_.fill(-1);
    aux_.clear();
}

int KernelSession::const_node(double v) {
    auto it = consts_.find(v);
    if (it != consts_.end()) return it->second;
    int id = tape_.constant(v, k_.layout.l);
    consts_[v] = id;
    return id;
}

int KernelSession::bias_node(int mapping) {
    if (bias_[mapping] < 0)
        bias_[mapping] = tape_.param(base_ + k_.layout.b_off + mapping * k_.layout.l, k_.layout.l);
    return bias_[mapping];
}

int KernelSession::aux_node(int id) {
    if (aux_.empty()) aux_.assign(k_.layout.aux_count, -1);
    if (aux_[id] < 0)
        aux_[id] = tape_.param(base_ + k_.layout.aux_off + id * k_.layout.l, k_.layout.l);
    return aux_[id];
}

KernelSession::StepState KernelSession::initial() {
    StepState st;
    int zero = const_node(0.0);
    st.s = {zero, zero, zero, zero};
    st.y = zero;
    return st;
}

KernelSession::StepState KernelSession::step(const StepState& prev, int x_node) {
    const int l = k_.layout.l;
    int ux = -1, wy = -1, ps = -1;
    if (k_.uses_input_mat)
        ux = tape_.matvec(base_ + k_.layout.u_off, kMappings * l, k_.layout.n_in, x_node);
    if (k_.uses_recur_mat) wy = tape_.matvec(base_ + k_.layout.w_off, kMappings * l, l, prev.y);
    if (k_.uses_peep_mat) ps = tape_.matvec(base_ + k_.layout.p_off, kMappings * l, l, prev.s[0]);

    regs_.assign(k_.code.size(), -1);
    for (size_t i = 0; i < k_.code.size(); ++i) {
        const auto& in = k_.code[i];
        int node = -1;
        switch (in.op) {
            case OpCode::Const: node = const_node(in.value); break;
            case OpCode::State: node = prev.s[in.imm]; break;
            case OpCode::Output: node = prev.y; break;
            case OpCode::InputMat: node = tape_.slice(ux, in.imm * l, l); break;
            case OpCode::RecurMat: node = tape_.slice(wy, in.imm * l, l); break;
            case OpCode::PeepMat: node = tape_.slice(ps, in.imm * l, l); break;
            case OpCode::BiasVec: node = bias_node(in.imm); break;
            case OpCode::AuxMul: node = tape_.mul(aux_node(in.imm), regs_[in.a]); break;
            case OpCode::Add: node = tape_.add(regs_[in.a], regs_[in.b]); break;
            case OpCode::Sub: node = tape_.sub(regs_[in.a], regs_[in.b]); break;
            case OpCode::Mul: node = tape_.mul(regs_[in.a], regs_[in.b]); break;
            case OpCode::Div: node = tape_.div(regs_[in.a], regs_[in.b]); break;
            case OpCode::Act:
                node = tape_.act(static_cast<dsl::ActFn>(in.imm), regs_[in.a]);
                break;
        }
        regs_[i] = node;
    }
    StepState next;
    for (int s = 0; s < 4; ++s) next.s[s] = regs_[k_.state_out[s]];
    next.y = regs_[k_.output_out];
    return next;
}

}  // namespace arn::rt
