#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace arn::data {

enum class Task { Regression, Classification };

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Series {
    long id = 0;
    std::vector<double> inputs;   // n_t x n_in, row-major
    std::vector<double> targets;  // regression: n_t x n_out
    int label = -1;               // classification
};

struct Dataset {
    Task task = Task::Regression;
    int n_in = 0;
    int n_out = 0;  // target dims (regression) or class count
    int n_t = 0;
    std::vector<Series> series;

    // Centering/scaling parameters, computed from the training split.
    bool preprocessed = false;
    std::vector<double> in_center, in_scale;
    std::vector<double> out_center, out_scale;  // regression targets only

    int size() const { return static_cast<int>(series.size()); }
};

struct SplitDataset {
    Dataset train, validation, test;
    bool test_used = false;  // the test split is use-once
};

// Interchange CSV: header `series_id,t,x0..x{k-1},` then either
// `y0..y{m-1}` (regression) or `label` (classification); one row per
// timestep, label repeated per row. Row order does not matter.
Dataset load_csv(const std::string& path);

void save_csv(const Dataset& d, const std::string& path);

// 50/25/25 shuffled split: ceil(n/2) / ceil(n/4) / remainder.
SplitDataset split(const Dataset& d, std::uint64_t seed);

// Center and scale ordinal columns with train-split statistics
// (stddev < 1e-12 leaves the column centered only). Classification
// labels stay integral; one-hot happens at the loss.
void preprocess(SplitDataset& s);

// Planar double pendulum, unit masses and lengths, g = 9.81, RK4 at
// dt_int = 1e-3 s internally, sampled every dtSample. Features are the
// four bob coordinates at t, targets the same coordinates at t+1.
Dataset gen_double_pendulum(int nSeries, int nSteps, double dtSample, std::uint64_t seed);

// Single RK4 integration step of the pendulum state (theta1, omega1,
// theta2, omega2); exposed for the generator's energy-drift checks.
void pendulum_rk4_step(double state[4], double dt);

// Total mechanical energy of a pendulum state.
double pendulum_energy(const double state[4]);

}  // namespace arn::data
