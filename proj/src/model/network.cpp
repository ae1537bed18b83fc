#include <algorithm>
#include <cmath>
#include <limits>

#include "arn/model/network.hpp"
#include "arn/runtime/init.hpp"

namespace arn::model {

Network make_network(compiler::NeuronKernel kernel, data::Task task, int n_out) {
    Network net;
    net.kernel = std::move(kernel);
    net.task = task;
    net.l = net.kernel.layout.l;
    net.n_in = net.kernel.layout.n_in;
    net.n_out = n_out;
    net.rec_off = 0;
    net.d1w_off = net.rec_off + net.kernel.layout.size;
    net.d1b_off = net.d1w_off + n_out * net.l;
    net.d2w_off = net.d1b_off + n_out;
    net.d2b_off = net.d2w_off + n_out * n_out;
    net.total = net.d2b_off + n_out;
    return net;
}

std::vector<double> init_params(const Network& net, std::uint64_t seed) {
    std::vector<double> p(net.total, 0.0);
    std::mt19937_64 rng(seed);
    rt::init_recurrent_weights(p, net.rec_off, net.kernel.layout, rng);
    rt::glorot_uniform(p.data() + net.d1w_off, net.n_out, net.l, 1.0, rng);
    rt::glorot_uniform(p.data() + net.d2w_off, net.n_out, net.n_out, 1.0, rng);
    return p;
}

void mask_hollow(const Network& net, std::vector<double>& v) {
    for (int idx : net.kernel.layout.hollow_indices()) v[net.rec_off + idx] = 0.0;
}

SeriesLoss forward_series(const Network& net, rt::Tape& tape, rt::KernelSession& session,
                          const data::Series& series, int n_t, bool with_loss) {
    SeriesLoss out;
    const int n_in = net.n_in, n_out = net.n_out;
    const int total_t = static_cast<int>(series.inputs.size()) / n_in;
    const int start_t = total_t - n_t;  // truncated evaluation keeps the tail

    auto state = session.initial();
    const bool regression = net.task == data::Task::Regression;
    const double weight = regression ? 1.0 / (static_cast<double>(n_t) * n_out) : 1.0;

    int logits = -1;
    for (int t = start_t; t < total_t; ++t) {
        int x = tape.input({series.inputs.data() + t * n_in, static_cast<size_t>(n_in)});
        state = session.step(state, x);
        if (!regression && t + 1 < total_t) continue;

        // dense tanh layer then dense linear layer
        int h = tape.act(dsl::ActFn::Tanh,
                         tape.add(tape.matvec(net.d1w_off, n_out, net.l, state.y),
                                  tape.param(net.d1b_off, n_out)));
        int z = tape.add(tape.matvec(net.d2w_off, n_out, n_out, h), tape.param(net.d2b_off, n_out));

        auto zv = tape.value(z);
        out.predictions.insert(out.predictions.end(), zv.begin(), zv.end());
        for (double v : zv)
            if (!std::isfinite(v)) out.finite = false;

        if (!with_loss) continue;
        if (regression) {
            int tgt = tape.input({series.targets.data() + t * n_out, static_cast<size_t>(n_out)});
            int term = tape.sum_sq(tape.sub(z, tgt));
            out.loss += weight * tape.scalar(term);
            out.seeds.emplace_back(term, weight);
        } else {
            logits = z;
        }
    }
    if (with_loss && !regression) {
        int lse = tape.log_sum_exp(logits);
        int picked = tape.slice(logits, series.label, 1);
        out.loss = tape.scalar(lse) - tape.scalar(picked);
        out.seeds.emplace_back(lse, 1.0);
        out.seeds.emplace_back(picked, -1.0);
    }
    if (!std::isfinite(out.loss)) out.finite = false;
    return out;
}

double evaluate_loss(const Network& net, const std::vector<double>& params, const data::Dataset& d) {
    rt::Tape tape;
    tape.bind(&params, nullptr);
    rt::KernelSession session(net.kernel, tape, net.rec_off);
    double sum = 0.0;
    for (const auto& s : d.series) {
        tape.reset();
        session.invalidate_cache();
        auto r = forward_series(net, tape, session, s, d.n_t);
        if (!r.finite) return std::numeric_limits<double>::infinity();
        sum += r.loss;
    }
    return sum / d.size();
}

double mse(const std::vector<double>& predictions, const std::vector<double>& targets) {
    double s = 0.0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        double e = predictions[i] - targets[i];
        s += e * e;
    }
    return s / static_cast<double>(predictions.size());
}

std::vector<double> softmax(const std::vector<double>& logits) {
    double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) z += (p[i] = std::exp(logits[i] - m));
    for (double& v : p) v /= z;
    return p;
}

double cce_from_logits(const std::vector<double>& logits, int label) {
    double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) z += std::exp(v - m);
    return m + std::log(z) - logits[label];
}

int argmax_lowest_tie(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

Metrics evaluate_metrics(const Network& net, const std::vector<double>& params,
                         const data::Dataset& d) {
    rt::Tape tape;
    tape.bind(&params, nullptr);
    rt::KernelSession session(net.kernel, tape, net.rec_off);
    Metrics m;
    int correct = 0;
    for (const auto& s : d.series) {
        tape.reset();
        session.invalidate_cache();
        auto r = forward_series(net, tape, session, s, d.n_t);
        m.loss += r.finite ? r.loss : std::numeric_limits<double>::infinity();
        if (net.task == data::Task::Classification &&
            argmax_lowest_tie(r.predictions) == s.label)
            ++correct;
    }
    m.loss /= d.size();
    if (net.task == data::Task::Classification)
        m.accuracy = static_cast<double>(correct) / d.size();
    return m;
}

}  // namespace arn::model
