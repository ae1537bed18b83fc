#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "arn/train/trainer.hpp"

namespace arn::train {

TrainConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config `" + path + "`");
    TrainConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config `" + path + "` line " + std::to_string(lineno) +
                                     ": expected key=value");
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "lr0") c.lr0 = std::stod(val);
            else if (key == "beta1") c.beta1 = std::stod(val);
            else if (key == "beta2") c.beta2 = std::stod(val);
            else if (key == "epsilon") c.epsilon = std::stod(val);
            else if (key == "decayFactor") c.decayFactor = std::stod(val);
            else if (key == "decaySteps") c.decaySteps = std::stol(val);
            else if (key == "batchSize") c.batchSize = std::stoi(val);
            else if (key == "totalExamples") c.totalExamples = std::stol(val);
            else if (key == "checkpointEvery") c.checkpointEvery = std::stol(val);
            else if (key == "seed") c.seed = std::stoull(val);
            else
                throw std::runtime_error("config `" + path + "` line " + std::to_string(lineno) +
                                         ": unknown key `" + key + "`");
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("config `" + path + "` line " + std::to_string(lineno) +
                                     ": bad value `" + val + "` for `" + key + "`");
        }
    }
    return c;
}

void save_config(const TrainConfig& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config `" + path + "`");
    out.precision(17);
    out << "# arn-train-config 1\n";
    out << "lr0 = " << c.lr0 << "\n";
    out << "beta1 = " << c.beta1 << "\n";
    out << "beta2 = " << c.beta2 << "\n";
    out << "epsilon = " << c.epsilon << "\n";
    out << "decayFactor = " << c.decayFactor << "\n";
    out << "decaySteps = " << c.decaySteps << "\n";
    out << "batchSize = " << c.batchSize << "\n";
    out << "totalExamples = " << c.totalExamples << "\n";
    out << "checkpointEvery = " << c.checkpointEvery << "\n";
    out << "seed = " << c.seed << "\n";
}

double lr_at(const TrainConfig& c, long step) {
    if (c.decaySteps <= 0) return c.lr0;
    double frac = std::min(1.0, static_cast<double>(step) / static_cast<double>(c.decaySteps));
    return c.lr0 * (1.0 + frac * (c.decayFactor - 1.0));
}

void adam_step(const model::Network& net, const TrainConfig& c, AdamState& st,
               std::vector<double>& params, const std::vector<double>& grad) {
    ++st.t;
    double lr = lr_at(c, st.t - 1);
    double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(st.t));
    double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(st.t));
    for (size_t i = 0; i < params.size(); ++i) {
        st.m[i] = c.beta1 * st.m[i] + (1.0 - c.beta1) * grad[i];
        st.v[i] = c.beta2 * st.v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
        params[i] -= lr * (st.m[i] / bc1) / (std::sqrt(st.v[i] / bc2) + c.epsilon);
    }
    model::mask_hollow(net, params);
}

TrainResult train(const model::Network& net, const TrainConfig& c, const data::Dataset& train_set,
                  const data::Dataset& validation) {
    const double inf = std::numeric_limits<double>::infinity();
    TrainResult res;
    std::mt19937_64 rng(c.seed);
    std::vector<double> params = model::init_params(net, rng());
    std::vector<double> grad(params.size(), 0.0);
    AdamState adam(params.size());

    rt::Tape tape;
    tape.bind(&params, &grad);
    rt::KernelSession session(net.kernel, tape, net.rec_off);

    res.best_validation = model::evaluate_loss(net, params, validation);
    res.best_params = params;
    res.validation_history.push_back(res.best_validation);
    if (!std::isfinite(res.best_validation)) {
        res.diverged = true;
        res.best_validation = inf;
        res.final_params = params;
        return res;
    }

    std::vector<int> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    size_t cursor = 0;

    auto hollow = net.kernel.layout.hollow_indices();
    long seen = 0, sinceCheckpoint = 0;
    while (seen < c.totalExamples) {
        tape.reset();
        session.invalidate_cache();
        std::fill(grad.begin(), grad.end(), 0.0);

        std::vector<std::pair<int, double>> seeds;
        int batch = static_cast<int>(std::min<long>(c.batchSize, c.totalExamples - seen));
        bool finite = true;
        for (int bi = 0; bi < batch; ++bi) {
            if (cursor == order.size()) {
                std::shuffle(order.begin(), order.end(), rng);
                cursor = 0;
            }
            const data::Series& s = train_set.series[order[cursor++]];
            auto r = model::forward_series(net, tape, session, s, train_set.n_t);
            finite = finite && r.finite;
            for (auto [node, weight] : r.seeds) seeds.emplace_back(node, weight / batch);
        }
        if (!finite) {
            res.diverged = true;
            res.best_validation = inf;
            break;
        }
        tape.backward(seeds);
        // masked diagonals must not accumulate adjoints across updates
        for (int idx : hollow) grad[net.rec_off + idx] = 0.0;
        adam_step(net, c, adam, params, grad);
        seen += batch;
        sinceCheckpoint += batch;
        ++res.updates;

        if (sinceCheckpoint >= c.checkpointEvery || seen >= c.totalExamples) {
            sinceCheckpoint = 0;
            double vl = model::evaluate_loss(net, params, validation);
            res.validation_history.push_back(vl);
            if (!std::isfinite(vl)) {
                res.diverged = true;
                res.best_validation = inf;
                break;
            }
            if (vl < res.best_validation) {
                res.best_validation = vl;
                res.best_params = params;
            }
        }
    }
    res.final_params = params;
    return res;
}

TrainConfig sample_config(const SearchRange& r, const TrainConfig& base, std::mt19937_64& rng) {
    auto log_uniform = [&](double lo, double hi) {
        std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
        return std::exp(u(rng));
    };
    TrainConfig c = base;
    c.lr0 = log_uniform(r.lr_min, r.lr_max);
    c.epsilon = log_uniform(r.eps_min, r.eps_max);
    c.beta1 = 1.0 - log_uniform(r.one_minus_b1_min, r.one_minus_b1_max);
    c.beta2 = 1.0 - log_uniform(r.one_minus_b2_min, r.one_minus_b2_max);
    std::uniform_real_distribution<double> u(r.decay_min, r.decay_max);
    c.decayFactor = u(rng);
    return c;
}

SearchResult random_search(const SearchRange& r, const TrainConfig& base, int nTrials,
                           std::uint64_t seed,
                           const std::function<double(const TrainConfig&)>& evaluate) {
    std::mt19937_64 rng(seed);
    SearchResult res;
    res.best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nTrials; ++i) {
        TrainConfig c = sample_config(r, base, rng);
        double v = evaluate(c);
        if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
        res.values.push_back(v);
        if (v < res.best_value) {
            res.best_value = v;
            res.best = c;
        }
    }
    if (res.values.empty()) throw std::runtime_error("random_search needs at least one trial");
    return res;
}

}  // namespace arn::train
