#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace arn::compiler {

inline constexpr int kMappings = 5;

// Static layout of the recurrent-layer weights inside a flat parameter
// block. The five input matrices are stacked into one (5l x n_in) matrix
// and likewise for the recurrent and peep stacks, so one matrix-vector
// product per stack serves all mappings in a timestep.
struct WeightLayout {
    int l = 0;
    int n_in = 0;
    int aux_count = 0;

    int u_off = 0;    // stacked U: 5l x n_in, row-major
    int w_off = 0;    // stacked W: 5l x l, hollow per l x l block
    int p_off = 0;    // stacked P: 5l x l, hollow per l x l block
    int b_off = 0;    // biases: 5 x l
    int aux_off = 0;  // auxiliary vectors: aux_count x l
    int size = 0;     // total doubles in the block

    static WeightLayout make(int l, int n_in, int aux_count) {
        WeightLayout lay;
        lay.l = l;
        lay.n_in = n_in;
        lay.aux_count = aux_count;
        lay.u_off = 0;
        lay.w_off = lay.u_off + kMappings * l * n_in;
        lay.p_off = lay.w_off + kMappings * l * l;
        lay.b_off = lay.p_off + kMappings * l * l;
        lay.aux_off = lay.b_off + kMappings * l;
        lay.size = lay.aux_off + aux_count * l;
        return lay;
    }

    // Flat indices of the diagonal entries of all W_i and P_i blocks.
    std::vector<int> hollow_indices() const {
        std::vector<int> idx;
        idx.reserve(2 * kMappings * l);
        for (int base : {w_off, p_off})
            for (int i = 0; i < kMappings; ++i)
                for (int j = 0; j < l; ++j) idx.push_back(base + (i * l + j) * l + j);
        return idx;
    }
};

enum class OpCode : std::uint8_t {
    Const,     // broadcast immediate `value` over l lanes
    State,     // read state s_imm at time t
    Output,    // read y at time t
    InputMat,  // U_imm . x(t)
    RecurMat,  // W_imm . y(t)   (hollow)
    PeepMat,   // P_imm . s0(t)  (hollow)
    BiasVec,   // b_imm
    AuxMul,    // aux_imm (.) r[a]
    Add,       // r[a] + r[b], elementwise
    Sub,
    Mul,
    Div,
    Act,  // activation imm applied to r[a]
};

struct Instr {
    OpCode op;
    int a = -1;
    int b = -1;
    int imm = 0;
    double value = 0.0;
};

// Compiled neuron: single-assignment register code over l-vectors.
// Register k is defined by instruction k.
struct NeuronKernel {
    std::vector<Instr> code;
    WeightLayout layout;
    std::array<int, 4> state_out{};  // registers holding s0'..s3'
    int output_out = -1;             // register holding y'
    std::array<bool, 4> state_in{};  // which of s0..s3 are read
    bool uses_input_mat = false;
    bool uses_recur_mat = false;
    bool uses_peep_mat = false;

    int register_count() const { return static_cast<int>(code.size()); }
};

}  // namespace arn::compiler
