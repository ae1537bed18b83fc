#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "arn/model/network.hpp"

namespace arn::train {

struct TrainConfig {
    double lr0 = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double decayFactor = 0.1;  // lr reaches lr0 * decayFactor at decaySteps
    long decaySteps = 80000;   // updates; 0 disables the schedule
    int batchSize = 4;
    long totalExamples = 320000;
    long checkpointEvery = 20000;  // examples between validation checks
    std::uint64_t seed = 0;
};

// key=value text file, one entry per line, `#` comments.
TrainConfig load_config(const std::string& path);
void save_config(const TrainConfig& c, const std::string& path);

// Linear decay from lr0 to lr0*decayFactor over decaySteps updates, then
// constant.
double lr_at(const TrainConfig& c, long step);

struct AdamState {
    std::vector<double> m, v;
    long t = 0;

    explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One ADAM update over the flat parameter vector; re-zeroes the hollow
// diagonals afterwards so masked entries never drift.
void adam_step(const model::Network& net, const TrainConfig& c, AdamState& st,
               std::vector<double>& params, const std::vector<double>& grad);

struct TrainResult {
    std::vector<double> best_params;   // checkpoint with the best validation loss
    double best_validation = 0.0;
    std::vector<double> final_params;
    std::vector<double> validation_history;  // one entry per checkpoint
    bool diverged = false;  // loss went non-finite; best_validation is +inf
    long updates = 0;
};

// Full training run: shuffled minibatch BPTT with per-epoch reshuffles,
// validation checkpoints every checkpointEvery examples. A non-finite
// training or validation loss aborts with diverged = true.
TrainResult train(const model::Network& net, const TrainConfig& c, const data::Dataset& train_set,
                  const data::Dataset& validation);

struct SearchRange {
    // log-uniform draws
    double lr_min = 1e-4, lr_max = 1e-1;
    double eps_min = 1e-9, eps_max = 1e-4;
    double one_minus_b1_min = 1e-3, one_minus_b1_max = 0.3;
    double one_minus_b2_min = 1e-5, one_minus_b2_max = 1e-2;
    // uniform draw
    double decay_min = 0.01, decay_max = 1.0;
};

TrainConfig sample_config(const SearchRange& r, const TrainConfig& base, std::mt19937_64& rng);

struct SearchResult {
    TrainConfig best;
    double best_value = 0.0;
    std::vector<double> values;  // per-trial objective, +inf for diverged
};

// Random hyperparameter search: draws nTrials configs and keeps the one
// with the lowest evaluator value (ties keep the earlier trial).
SearchResult random_search(const SearchRange& r, const TrainConfig& base, int nTrials,
                           std::uint64_t seed,
                           const std::function<double(const TrainConfig&)>& evaluate);

}  // namespace arn::train
