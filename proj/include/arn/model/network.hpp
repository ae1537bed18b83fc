#pragma once

#include <random>
#include <vector>

#include "arn/compiler/kernel.hpp"
#include "arn/data/dataset.hpp"
#include "arn/runtime/executor.hpp"
#include "arn/runtime/tape.hpp"

namespace arn::model {

// ARN layer (l nodes) -> dense tanh layer (n_out) -> dense linear layer
// (n_out). Regression reads predictions at every timestep, classification
// reads logits at the final timestep only.
struct Network {
    compiler::NeuronKernel kernel;
    data::Task task = data::Task::Regression;
    int l = 0, n_in = 0, n_out = 0;

    // flat parameter vector layout
    int rec_off = 0;  // recurrent block (kernel.layout)
    int d1w_off = 0, d1b_off = 0;  // n_out x l, n_out
    int d2w_off = 0, d2b_off = 0;  // n_out x n_out, n_out
    int total = 0;
};

Network make_network(compiler::NeuronKernel kernel, data::Task task, int n_out);

// Fresh parameter vector: recurrent block per init_recurrent_weights,
// backend layers Glorot-uniform with zero biases.
std::vector<double> init_params(const Network& net, std::uint64_t seed);

// Zero the diagonals of all W_i / P_i blocks in a parameter or gradient
// vector.
void mask_hollow(const Network& net, std::vector<double>& v);

struct SeriesLoss {
    double loss = 0.0;  // MSE (regression) or CCE (classification)
    bool finite = true;
    std::vector<std::pair<int, double>> seeds;  // tape loss terms
    std::vector<double> predictions;            // n_t x n_out or final logits
};

// Unrolls the whole series on the tape (states start at zero) and forms
// the loss terms. The caller owns tape reset and backward.
SeriesLoss forward_series(const Network& net, rt::Tape& tape, rt::KernelSession& session,
                          const data::Series& series, int n_t, bool with_loss = true);

// Dataset-mean loss without any tape bookkeeping beyond forward passes.
double evaluate_loss(const Network& net, const std::vector<double>& params, const data::Dataset& d);

// Plain-math losses over stored predictions.
double mse(const std::vector<double>& predictions, const std::vector<double>& targets);
double cce_from_logits(const std::vector<double>& logits, int label);
std::vector<double> softmax(const std::vector<double>& logits);
int argmax_lowest_tie(const std::vector<double>& v);

struct Metrics {
    double loss = 0.0;  // CCE or MSE
    double accuracy = -1.0;  // classification only
};

Metrics evaluate_metrics(const Network& net, const std::vector<double>& params,
                         const data::Dataset& d);

}  // namespace arn::model
