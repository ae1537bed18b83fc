#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "arn/data/dataset.hpp"

namespace arn::data {

SplitDataset split(const Dataset& d, std::uint64_t seed) {
    int n = d.size();
    if (n < 4) throw DataError("need at least 4 series to split 50/25/25");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    int nTrain = (n + 1) / 2;
    int nVal = (n + 3) / 4;
    int nTest = n - nTrain - nVal;
    if (nTest < 1) throw DataError("too few series: test split would be empty");

    SplitDataset out;
    auto header = [&](Dataset& part) {
        part.task = d.task;
        part.n_in = d.n_in;
        part.n_out = d.n_out;
        part.n_t = d.n_t;
    };
    header(out.train);
    header(out.validation);
    header(out.test);
    for (int i = 0; i < n; ++i) {
        const Series& s = d.series[idx[i]];
        if (i < nTrain) out.train.series.push_back(s);
        else if (i < nTrain + nVal) out.validation.series.push_back(s);
        else out.test.series.push_back(s);
    }
    return out;
}

namespace {

struct Moments {
    std::vector<double> center, scale;
};

Moments column_moments(const std::vector<const std::vector<double>*>& cols, int width) {
    Moments m;
    m.center.assign(width, 0.0);
    m.scale.assign(width, 1.0);
    long count = 0;
    for (const auto* v : cols) count += static_cast<long>(v->size()) / width;
    for (const auto* v : cols)
        for (size_t i = 0; i < v->size(); ++i) m.center[i % width] += (*v)[i];
    for (int j = 0; j < width; ++j) m.center[j] /= static_cast<double>(count);
    std::vector<double> ss(width, 0.0);
    for (const auto* v : cols)
        for (size_t i = 0; i < v->size(); ++i) {
            double dlt = (*v)[i] - m.center[i % width];
            ss[i % width] += dlt * dlt;
        }
    for (int j = 0; j < width; ++j) {
        double sd = std::sqrt(ss[j] / static_cast<double>(count));
        m.scale[j] = sd < 1e-12 ? 1.0 : sd;  // constant-column guard
    }
    return m;
}

void apply(std::vector<double>& v, const Moments& m, int width) {
    for (size_t i = 0; i < v.size(); ++i) v[i] = (v[i] - m.center[i % width]) / m.scale[i % width];
}

}  // namespace

void preprocess(SplitDataset& s) {
    if (s.train.preprocessed) throw DataError("dataset already preprocessed");

    std::vector<const std::vector<double>*> in_cols, out_cols;
    for (const auto& ser : s.train.series) {
        in_cols.push_back(&ser.inputs);
        if (s.train.task == Task::Regression) out_cols.push_back(&ser.targets);
    }
    Moments in_m = column_moments(in_cols, s.train.n_in);
    Moments out_m;
    if (s.train.task == Task::Regression) out_m = column_moments(out_cols, s.train.n_out);

    for (Dataset* part : {&s.train, &s.validation, &s.test}) {
        for (auto& ser : part->series) {
            apply(ser.inputs, in_m, part->n_in);
            if (part->task == Task::Regression) apply(ser.targets, out_m, part->n_out);
        }
        part->preprocessed = true;
        part->in_center = in_m.center;
        part->in_scale = in_m.scale;
        if (part->task == Task::Regression) {
            part->out_center = out_m.center;
            part->out_scale = out_m.scale;
        }
    }
}

}  // namespace arn::data
