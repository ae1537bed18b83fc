#pragma once

#include <array>
#include <map>

#include "arn/compiler/kernel.hpp"
#include "arn/runtime/tape.hpp"

namespace arn::rt {

// Runs a compiled neuron over timesteps, recording every operation on the
// tape. One session per (kernel, parameter block); sessions share nothing
// and may run on different threads.
class KernelSession {
  public:
    struct StepState {
        std::array<int, 4> s{};  // tape nodes for s0..s3
        int y = -1;
    };

    // `base` is the offset of the recurrent weight block in the flat
    // parameter vector bound to `tape`.
    KernelSession(const compiler::NeuronKernel& kernel, Tape& tape, int base)
        : k_(kernel), tape_(tape), base_(base) {}

    // All-zero state for t = 0.
    StepState initial();

    // One transition: consumes state nodes at t and an input node x(t)
    // of length n_in, returns state nodes at t+1.
    StepState step(const StepState& prev, int x_node);

    // Must be called after the bound tape is reset.
    void invalidate_cache();

  private:
    int const_node(double v);
    int bias_node(int mapping);
    int aux_node(int id);

    const compiler::NeuronKernel& k_;
    Tape& tape_;
    int base_;
    std::map<double, int> consts_;
    std::array<int, compiler::kMappings> bias_{-1, -1, -1, -1, -1};
    std::vector<int> aux_;
    std::vector<int> regs_;
};

}  // namespace arn::rt
