#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "arn/compiler/compile.hpp"
#include "arn/data/dataset.hpp"
#include "arn/dsl/complexity.hpp"
#include "arn/dsl/parser.hpp"
#include "arn/dsl/pretty.hpp"
#include "arn/dsl/zoo.hpp"
#include "arn/evolve/evolve.hpp"
#include "arn/model/network.hpp"
#include "arn/stats/stats.hpp"
#include "arn/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace arn;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data::DataError("cannot open `" + path + "`");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// `zoo:NAME` or a file path.
dsl::NeuronProgram load_neuron(const std::string& ref) {
    if (ref.rfind("zoo:", 0) == 0) {
        std::string name = ref.substr(4);
        if (!dsl::zoo_has(name)) throw UsageError("unknown zoo neuron `" + name + "`");
        return dsl::zoo_program(name);
    }
    return dsl::parse(slurp(ref));
}

std::string default_out_dir() {
    const char* cache = std::getenv("ARN_CACHE_DIR");
    return cache && *cache ? cache : ".";
}

// ---------------------------------------------------------------------------
// model checkpoint directory

struct Checkpoint {
    dsl::NeuronProgram program;
    data::Task task = data::Task::Regression;
    int l = 0, n_in = 0, n_out = 0;
    std::uint64_t split_seed = 0;
    std::vector<double> params;
};

void save_checkpoint(const Checkpoint& c, const std::string& dir) {
    fs::create_directories(dir);
    std::ofstream neuron(dir + "/neuron.arn");
    neuron << dsl::pretty_print(c.program) << '\n';

    std::ofstream out(dir + "/params.txt");
    out.precision(17);
    out << "# arn-model 1\n";
    out << "task = " << (c.task == data::Task::Regression ? "reg" : "cls") << '\n';
    out << "l = " << c.l << '\n';
    out << "n_in = " << c.n_in << '\n';
    out << "n_out = " << c.n_out << '\n';
    out << "split_seed = " << c.split_seed << '\n';
    out << "params = " << c.params.size() << '\n';
    for (double v : c.params) out << v << '\n';
}

Checkpoint load_checkpoint(const std::string& dir) {
    Checkpoint c;
    c.program = dsl::parse(slurp(dir + "/neuron.arn"));
    std::ifstream in(dir + "/params.txt");
    if (!in) throw data::DataError("cannot open `" + dir + "/params.txt`");
    std::string line;
    long count = -1;
    while (count < 0 && std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ss(line);
        std::string key, eq, val;
        if (!(ss >> key >> eq >> val) || eq != "=")
            throw data::DataError("`" + dir + "/params.txt`: malformed line: " + line);
        if (key == "task") c.task = val == "cls" ? data::Task::Classification : data::Task::Regression;
        else if (key == "l") c.l = std::stoi(val);
        else if (key == "n_in") c.n_in = std::stoi(val);
        else if (key == "n_out") c.n_out = std::stoi(val);
        else if (key == "split_seed") c.split_seed = std::stoull(val);
        else if (key == "params") count = std::stol(val);
        else throw data::DataError("`" + dir + "/params.txt`: unknown key `" + key + "`");
    }
    if (count < 0) throw data::DataError("`" + dir + "/params.txt`: missing params count");
    c.params.resize(count);
    for (long i = 0; i < count; ++i)
        if (!(in >> c.params[i]))
            throw data::DataError("`" + dir + "/params.txt`: truncated parameter vector");
    return c;
}

model::Network network_for(const Checkpoint& c) {
    auto typed = dsl::typecheck(c.program);
    auto kernel = compiler::compile(typed, c.l, c.n_in);
    return model::make_network(std::move(kernel), c.task, c.n_out);
}

// ---------------------------------------------------------------------------
// prediction files

void save_predictions(const model::Network& net, const std::vector<double>& params,
                      const data::Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data::DataError("cannot write `" + path + "`");
    out.precision(17);
    out << "# arn-predictions 1\n";
    rt::Tape tape;
    tape.bind(&params, nullptr);
    rt::KernelSession session(net.kernel, tape, net.rec_off);
    if (net.task == data::Task::Classification) {
        out << "series_id,label\n";
        for (size_t si = 0; si < d.series.size(); ++si) {
            tape.reset();
            session.invalidate_cache();
            auto r = model::forward_series(net, tape, session, d.series[si], d.n_t, false);
            out << si << ',' << model::argmax_lowest_tie(r.predictions) << '\n';
        }
    } else {
        out << "series_id,t";
        for (int j = 0; j < net.n_out; ++j) out << ",y" << j;
        out << '\n';
        for (size_t si = 0; si < d.series.size(); ++si) {
            tape.reset();
            session.invalidate_cache();
            auto r = model::forward_series(net, tape, session, d.series[si], d.n_t, false);
            for (int t = 0; t < d.n_t; ++t) {
                out << si << ',' << t;
                for (int j = 0; j < net.n_out; ++j) out << ',' << r.predictions[t * net.n_out + j];
                out << '\n';
            }
        }
    }
}

struct Predictions {
    bool classification = false;
    std::vector<int> labels;                 // per series
    std::vector<std::vector<double>> values;  // per series, n_t x n_out
};

Predictions load_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data::DataError("cannot open `" + path + "`");
    std::string line;
    if (!std::getline(in, line)) throw data::DataError("`" + path + "`: empty file");
    if (!line.empty() && line.front() == '#')
        if (!std::getline(in, line)) throw data::DataError("`" + path + "`: missing header");
    Predictions p;
    p.classification = line == "series_id,label";
    std::map<long, std::map<long, std::vector<double>>> rows;
    std::map<long, int> labels;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw data::DataError("`" + path + "`: bad cell at line " + std::to_string(lineno));
            }
        }
        if (p.classification) {
            if (vals.size() != 2)
                throw data::DataError("`" + path + "`: expected series_id,label at line " +
                                      std::to_string(lineno));
            labels[std::lround(vals[0])] = static_cast<int>(std::lround(vals[1]));
        } else {
            if (vals.size() < 3)
                throw data::DataError("`" + path + "`: expected series_id,t,y.. at line " +
                                      std::to_string(lineno));
            rows[std::lround(vals[0])][std::lround(vals[1])] =
                std::vector<double>(vals.begin() + 2, vals.end());
        }
    }
    if (p.classification) {
        for (auto& [id, lab] : labels) p.labels.push_back(lab);
    } else {
        for (auto& [id, by_t] : rows) {
            std::vector<double> flat;
            for (auto& [t, v] : by_t) flat.insert(flat.end(), v.begin(), v.end());
            p.values.push_back(std::move(flat));
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// subcommand bodies

int cmd_train(const std::string& neuronRef, const std::string& dataPath,
              const std::string& configPath, const std::string& outDir, int nodes) {
    auto program = load_neuron(neuronRef);
    train::TrainConfig cfg =
        configPath.empty() ? train::TrainConfig{} : train::load_config(configPath);
    data::Dataset all = data::load_csv(dataPath);
    auto splits = data::split(all, cfg.seed);
    data::preprocess(splits);

    Checkpoint ck;
    ck.program = program;
    ck.task = all.task;
    ck.l = nodes;
    ck.n_in = all.n_in;
    ck.n_out = all.n_out;
    ck.split_seed = cfg.seed;

    auto net = network_for(ck);
    auto res = train::train(net, cfg, splits.train, splits.validation);
    if (res.diverged) throw NumericError("training diverged (non-finite loss)");

    ck.params = res.best_params;
    fs::create_directories(outDir);
    save_checkpoint(ck, outDir);
    train::save_config(cfg, outDir + "/config.txt");

    std::ofstream hist(outDir + "/history.csv");
    hist.precision(17);
    hist << "# arn-history 1\ncheckpoint,validation_loss\n";
    for (size_t i = 0; i < res.validation_history.size(); ++i)
        hist << i << ',' << res.validation_history[i] << '\n';

    std::ofstream summary(outDir + "/summary.txt");
    summary.precision(17);
    summary << "# arn-summary 1\n";
    summary << "updates = " << res.updates << '\n';
    summary << "best_validation_loss = " << res.best_validation << '\n';
    summary << "complexity_bits = " << dsl::complexity(program) << '\n';
    std::cout << "best validation loss " << res.best_validation << " after " << res.updates
              << " updates -> " << outDir << '\n';
    return 0;
}

int cmd_eval(const std::string& modelDir, const std::string& dataPath, const std::string& splitName,
             const std::string& predOut, const std::string& targetsOut) {
    Checkpoint ck = load_checkpoint(modelDir);
    data::Dataset all = data::load_csv(dataPath);
    auto splits = data::split(all, ck.split_seed);
    data::preprocess(splits);
    const data::Dataset* part = nullptr;
    if (splitName == "train") part = &splits.train;
    else if (splitName == "validation") part = &splits.validation;
    else if (splitName == "test") part = &splits.test;
    else throw UsageError("--split must be train, validation or test");

    auto net = network_for(ck);
    auto m = model::evaluate_metrics(net, ck.params, *part);
    std::cout.precision(10);
    std::cout << "split " << splitName << " loss " << m.loss;
    if (m.accuracy >= 0.0) std::cout << " accuracy " << m.accuracy;
    std::cout << '\n';
    if (!predOut.empty()) save_predictions(net, ck.params, *part, predOut);
    if (!targetsOut.empty()) data::save_csv(*part, targetsOut);
    return 0;
}

evolve::StagePlan load_plan(const std::string& path) {
    evolve::StagePlan plan;
    plan.stages.clear();
    std::ifstream in(path);
    if (!in) throw data::DataError("cannot open plan `" + path + "`");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "passFraction") {
            if (!(ss >> plan.passFraction))
                throw data::DataError("plan `" + path + "`: bad passFraction");
        } else if (tag == "stage") {
            evolve::StageSpec s;
            if (!(ss >> s.nodes >> s.examples >> s.timesteps))
                throw data::DataError("plan `" + path + "`: stage needs nodes examples timesteps");
            plan.stages.push_back(s);
        } else {
            throw data::DataError("plan `" + path + "`: unknown directive `" + tag + "`");
        }
    }
    if (plan.stages.empty()) throw data::DataError("plan `" + path + "`: no stages");
    return plan;
}

int cmd_evolve(const std::string& dataPath, const std::string& planPath,
               const std::string& neuronRef, int generations, int population,
               std::uint64_t seed, int workers, const std::string& outDir,
               const std::string& resumePath) {
    auto seedProgram = load_neuron(neuronRef);
    data::Dataset all = data::load_csv(dataPath);
    auto splits = data::split(all, seed);
    data::preprocess(splits);

    evolve::StagePlan plan =
        planPath.empty() ? evolve::StagePlan::standard(16, 1) : load_plan(planPath);

    fs::create_directories(outDir);
    evolve::EvolveConfig cfg;
    cfg.generations = generations;
    cfg.populationSize = population;
    cfg.workers = workers;
    cfg.seed = seed;
    cfg.auditPath = outDir + "/audit.log";
    cfg.frontSnapshotPath = outDir + "/front.txt";

    evolve::ParetoFront resume;
    if (!resumePath.empty()) resume = evolve::load_front(resumePath);

    auto front =
        evolve::evolve_run(seedProgram, plan, cfg, splits.train, splits.validation, resume);
    if (front.entries.empty()) throw NumericError("all candidates diverged; empty front");

    std::ofstream scatter(outDir + "/front_scatter.csv");
    scatter.precision(17);
    scatter << "# arn-front-scatter 1\ncomplexity_bits,validation_loss\n";
    for (const auto& e : front.entries) scatter << e.complexity << ',' << e.loss << '\n';

    std::cout << "front size " << front.entries.size() << ", best validation loss "
              << front.best()->loss << " -> " << outDir << '\n';
    return 0;
}

int cmd_compare(const std::string& aPath, const std::string& bPath, const std::string& targetPath,
                const std::string& task) {
    data::Dataset targets = data::load_csv(targetPath);
    Predictions a = load_predictions(aPath), b = load_predictions(bPath);
    std::cout.precision(6);
    if (task == "cls") {
        if (!a.classification || !b.classification)
            throw data::DataError("classification comparison needs label predictions");
        size_t n = targets.series.size();
        if (a.labels.size() != n || b.labels.size() != n)
            throw data::DataError("prediction/target series count mismatch");
        long right_a = 0, right_b = 0, bc = 0, cb = 0;
        for (size_t i = 0; i < n; ++i) {
            bool ra = a.labels[i] == targets.series[i].label;
            bool rb = b.labels[i] == targets.series[i].label;
            right_a += ra;
            right_b += rb;
            bc += ra && !rb;
            cb += !ra && rb;
        }
        auto r = stats::mcnemar(bc, cb);
        double acc_a = static_cast<double>(right_a) / n;
        double acc_b = static_cast<double>(right_b) / n;
        std::cout << "accuracy_a " << acc_a << " accuracy_b " << acc_b << " factor_better "
                  << (1.0 - acc_b) / (1.0 - acc_a) << " chi2 " << r.chi2 << " p " << r.p << '\n';
    } else if (task == "reg") {
        if (a.classification || b.classification)
            throw data::DataError("regression comparison needs value predictions");
        size_t n = targets.series.size();
        if (a.values.size() != n || b.values.size() != n)
            throw data::DataError("prediction/target series count mismatch");
        double msa = 0.0, msb = 0.0;
        std::vector<double> diffs;
        for (size_t i = 0; i < n; ++i) {
            double ea = model::mse(a.values[i], targets.series[i].targets);
            double eb = model::mse(b.values[i], targets.series[i].targets);
            msa += ea;
            msb += eb;
            diffs.push_back(ea - eb);
        }
        msa /= n;
        msb /= n;
        auto r = stats::wilcoxon_signed_rank(diffs);
        std::cout << "mse_a " << msa << " mse_b " << msb << " factor_better " << msa / msb
                  << " w_minus " << r.w_minus << " p " << r.p << '\n';
    } else {
        throw UsageError("--task must be cls or reg");
    }
    return 0;
}

int cmd_search(const std::string& dataPath, const std::string& neuronRef, int budget,
               std::uint64_t seed, long examples, int nodes, const std::string& outPath) {
    auto program = load_neuron(neuronRef);
    data::Dataset all = data::load_csv(dataPath);
    auto splits = data::split(all, seed);
    data::preprocess(splits);

    auto typed = dsl::typecheck(program);
    auto kernel = compiler::compile(typed, nodes, all.n_in);
    auto net = model::make_network(std::move(kernel), all.task, all.n_out);

    train::TrainConfig base;
    base.totalExamples = examples;
    train::SearchRange range;
    int trial = 0;
    auto res = train::random_search(range, base, budget, seed, [&](const train::TrainConfig& c) {
        train::TrainConfig cfg = c;
        cfg.seed = seed + static_cast<std::uint64_t>(++trial);
        auto r = train::train(net, cfg, splits.train, splits.validation);
        return r.diverged ? std::numeric_limits<double>::infinity() : r.best_validation;
    });
    if (!std::isfinite(res.best_value)) throw NumericError("all search trials diverged");
    train::save_config(res.best, outPath);
    std::cout << "best validation loss " << res.best_value << " -> " << outPath << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ARN neuron pipeline"};
    app.require_subcommand(1);

    // gen-pendulum
    auto* gen = app.add_subcommand("gen-pendulum", "generate a double-pendulum dataset");
    int genSeries = 2000, genSteps = 64;
    double genDt = 0.05;
    std::uint64_t genSeed = 0;
    std::string genOut;
    gen->add_option("--series", genSeries, "number of series");
    gen->add_option("--steps", genSteps, "timesteps per series");
    gen->add_option("--dt", genDt, "sampling interval in seconds");
    gen->add_option("--seed", genSeed, "RNG seed");
    gen->add_option("--out", genOut, "output CSV path")->required();

    // train
    auto* tr = app.add_subcommand("train", "train a neuron on a dataset");
    std::string trNeuron, trData, trConfig, trOut = default_out_dir() + "/model";
    int trNodes = 16;
    tr->add_option("--neuron", trNeuron, "neuron file or zoo:NAME")->required();
    tr->add_option("--data", trData, "dataset CSV")->required();
    tr->add_option("--config", trConfig, "training config file");
    tr->add_option("--out", trOut, "checkpoint directory");
    tr->add_option("--nodes", trNodes, "recurrent layer width l");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
    std::string evModel, evData, evSplit = "test", evPred, evTargets;
    ev->add_option("--model", evModel, "checkpoint directory")->required();
    ev->add_option("--data", evData, "dataset CSV")->required();
    ev->add_option("--split", evSplit, "train|validation|test");
    ev->add_option("--predictions", evPred, "also write a predictions file");
    ev->add_option("--targets-out", evTargets, "also write the evaluated split as a dataset CSV");

    // evolve
    auto* evo = app.add_subcommand("evolve", "staged evolutionary search");
    std::string evoData, evoPlan, evoNeuron = "zoo:lstm", evoOut = default_out_dir() + "/evolve";
    std::string evoResume;
    int evoGen = 30, evoPop = 256, evoWorkers = 1;
    std::uint64_t evoSeed = 0;
    evo->add_option("--data", evoData, "dataset CSV")->required();
    evo->add_option("--plan", evoPlan, "stage plan file");
    evo->add_option("--neuron", evoNeuron, "seed neuron file or zoo:NAME");
    evo->add_option("--generations", evoGen, "generation count");
    evo->add_option("--population", evoPop, "candidates per generation");
    evo->add_option("--seed", evoSeed, "RNG seed");
    evo->add_option("--workers", evoWorkers, "evaluation threads");
    evo->add_option("--out", evoOut, "output directory");
    evo->add_option("--resume", evoResume, "front snapshot to resume from");

    // compile
    auto* co = app.add_subcommand("compile", "compile a neuron and print code");
    std::string coNeuron, coEmit = "c";
    int coNodes = 4, coInputs = 2;
    co->add_option("--neuron", coNeuron, "neuron file or zoo:NAME")->required();
    co->add_option("--emit", coEmit, "c|graph");
    co->add_option("--nodes", coNodes, "layer width l");
    co->add_option("--inputs", coInputs, "input width");

    // zoo
    auto* zoo = app.add_subcommand("zoo", "built-in neuron corpus");
    auto* zooList = zoo->add_subcommand("list", "list corpus names");
    zoo->require_subcommand(1);

    // compare
    auto* cmp = app.add_subcommand("compare", "statistical model comparison");
    std::string cmpA, cmpB, cmpTargets, cmpTask;
    cmp->add_option("--a", cmpA, "predictions of model A")->required();
    cmp->add_option("--b", cmpB, "predictions of model B")->required();
    cmp->add_option("--targets", cmpTargets, "target dataset CSV")->required();
    cmp->add_option("--task", cmpTask, "cls|reg")->required();

    // search
    auto* se = app.add_subcommand("search", "random hyperparameter search");
    std::string seData, seNeuron = "zoo:lstm", seOut = default_out_dir() + "/best_config.txt";
    int seBudget = 512, seNodes = 8;
    long seExamples = 5000;
    std::uint64_t seSeed = 0;
    se->add_option("--data", seData, "dataset CSV")->required();
    se->add_option("--neuron", seNeuron, "neuron file or zoo:NAME");
    se->add_option("--budget", seBudget, "number of trials");
    se->add_option("--examples", seExamples, "training examples per trial");
    se->add_option("--nodes", seNodes, "layer width l");
    se->add_option("--seed", seSeed, "RNG seed");
    se->add_option("--out", seOut, "best config output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            auto d = data::gen_double_pendulum(genSeries, genSteps, genDt, genSeed);
            data::save_csv(d, genOut);
            std::cout << "wrote " << genSeries << " series -> " << genOut << '\n';
            return 0;
        }
        if (tr->parsed()) return cmd_train(trNeuron, trData, trConfig, trOut, trNodes);
        if (ev->parsed()) return cmd_eval(evModel, evData, evSplit, evPred, evTargets);
        if (evo->parsed())
            return cmd_evolve(evoData, evoPlan, evoNeuron, evoGen, evoPop, evoSeed, evoWorkers,
                              evoOut, evoResume);
        if (co->parsed()) {
            auto program = load_neuron(coNeuron);
            auto typed = dsl::typecheck(program);
            auto kernel = compiler::compile(typed, coNodes, coInputs);
            if (coEmit == "c") std::cout << compiler::emit_readable(kernel);
            else if (coEmit == "graph") std::cout << compiler::emit_graph(kernel);
            else throw UsageError("--emit must be c or graph");
            return 0;
        }
        if (zooList->parsed()) {
            for (const auto& name : dsl::zoo_names()) std::cout << name << '\n';
            return 0;
        }
        if (cmp->parsed()) return cmd_compare(cmpA, cmpB, cmpTargets, cmpTask);
        if (se->parsed())
            return cmd_search(seData, seNeuron, seBudget, seSeed, seExamples, seNodes, seOut);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const data::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const dsl::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitData;
    } catch (const dsl::TypeError& e) {
        std::cerr << "type error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
