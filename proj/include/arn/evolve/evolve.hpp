#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "arn/dsl/ast.hpp"
#include "arn/data/dataset.hpp"
#include "arn/train/trainer.hpp"

namespace arn::evolve {

// One screening stage: train with `nodes` recurrent nodes on `examples`
// training examples; `timesteps` = 0 evaluates full series, otherwise
// only the trailing `timesteps` steps.
struct StageSpec {
    int nodes = 4;
    long examples = 5000;
    int timesteps = 5;
};

struct StagePlan {
    std::vector<StageSpec> stages;
    double passFraction = 0.01;  // fraction of a generation advancing per stage

    // The standard three-stage ladder for a full layer of l nodes:
    // {4, 5000, last 5} -> {l/4, 40000, all} -> {l, 320000, all}.
    // `nStages` trims from the deep end for budget-limited runs.
    static StagePlan standard(int l, int nStages = 3);
};

// Relative cost of a stage-2 evaluation versus stage 1 for a layer of l
// nodes on series of n_t timesteps: 8 * (l/16)^2 * n_t / 5. The stage-3 /
// stage-2 ratio is a fixed 128.
double stage_cost_multiplier(int l, int n_t);

struct Candidate {
    dsl::NeuronProgram program;
    double complexity = 0.0;
    std::vector<double> stageLoss;  // one entry per stage reached
    long id = -1;
    long parent = -1;
    std::string transformation;  // seed | grow | const | act | rewire
    std::string diagnostic;      // compile/type failure message

    // Validation loss at the deepest stage reached; +inf before any stage
    // or after a failure.
    double value() const;
};

struct FrontEntry {
    double complexity = 0.0;
    double loss = 0.0;
    dsl::NeuronProgram program;
};

// Complexity/loss Pareto front, sorted by complexity ascending with
// strictly decreasing loss.
struct ParetoFront {
    std::vector<FrontEntry> entries;

    // Insert if no member has (<= complexity, <= loss) with one strict;
    // drops members the entry dominates. Returns true if inserted.
    bool update(FrontEntry e);

    // Lowest-loss member (the last entry), or nullptr if empty.
    const FrontEntry* best() const;
};

void save_front(const ParetoFront& f, const std::string& path);
ParetoFront load_front(const std::string& path);

// One random transformation of the parent: grow a fresh scalar
// subexpression (depth <= 3), perturb a constant, swap an activation, or
// rewire a state slot of the output tuple. The result always type-checks;
// after 20 failed attempts the parent itself is returned.
dsl::NeuronProgram mutate(const dsl::NeuronProgram& parent, std::mt19937_64& rng,
                          std::string* tag = nullptr);

// Train the program under one stage spec and return the best validation
// loss; any compile/type/numeric failure yields +inf (message in *diag).
double evaluate_stage(const dsl::NeuronProgram& p, const StageSpec& stage,
                      const data::Dataset& train_set, const data::Dataset& validation,
                      const train::TrainConfig& base, std::uint64_t seed,
                      std::string* diag = nullptr);

struct EvolveConfig {
    int generations = 30;
    int populationSize = 256;
    int workers = 1;
    std::uint64_t seed = 0;
    train::TrainConfig base;     // per-stage runs override totalExamples
    std::string auditPath;       // line-delimited candidate log; empty = off
    std::string frontSnapshotPath;  // rewritten after every generation; empty = off
};

// Staged-screening evolutionary loop. Each generation mutates front
// members into `populationSize` candidates, screens them through the
// stage ladder (generation-relative ranking, passFraction survivors per
// stage) and offers finishers to the front. Results are deterministic in
// (seed, plan, data) for any worker count. A non-empty `resume` front
// seeds the search alongside the seed program.
ParetoFront evolve_run(const dsl::NeuronProgram& seedProgram, const StagePlan& plan,
                       const EvolveConfig& cfg, const data::Dataset& train_set,
                       const data::Dataset& validation, ParetoFront resume = {});

}  // namespace arn::evolve
