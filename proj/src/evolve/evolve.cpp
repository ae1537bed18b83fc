#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "arn/compiler/compile.hpp"
#include "arn/dsl/complexity.hpp"
#include "arn/dsl/parser.hpp"
#include "arn/dsl/pretty.hpp"
#include "arn/evolve/evolve.hpp"

namespace arn::evolve {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

StagePlan StagePlan::standard(int l, int nStages) {
    StagePlan plan;
    plan.stages.push_back({4, 5000, 5});
    plan.stages.push_back({std::max(2, l / 4), 40000, 0});
    plan.stages.push_back({l, 320000, 0});
    if (nStages < 1 || nStages > 3)
        throw std::invalid_argument("stage plan supports 1..3 stages");
    plan.stages.resize(nStages);
    return plan;
}

double stage_cost_multiplier(int l, int n_t) {
    double lr = static_cast<double>(l) / 16.0;
    return 8.0 * lr * lr * static_cast<double>(n_t) / 5.0;
}

double Candidate::value() const {
    if (stageLoss.empty()) return kInf;
    double v = stageLoss.back();
    return std::isfinite(v) ? v : kInf;
}

bool ParetoFront::update(FrontEntry e) {
    if (!std::isfinite(e.loss)) return false;
    for (const auto& m : entries) {
        bool le_c = m.complexity <= e.complexity, le_l = m.loss <= e.loss;
        if (le_c && le_l && (m.complexity < e.complexity || m.loss < e.loss)) return false;
        if (m.complexity == e.complexity && m.loss == e.loss) return false;
    }
    std::erase_if(entries, [&](const FrontEntry& m) {
        return e.complexity <= m.complexity && e.loss <= m.loss;
    });
    auto pos = std::lower_bound(entries.begin(), entries.end(), e.complexity,
                                [](const FrontEntry& m, double c) { return m.complexity < c; });
    entries.insert(pos, std::move(e));
    return true;
}

const FrontEntry* ParetoFront::best() const {
    return entries.empty() ? nullptr : &entries.back();
}

void save_front(const ParetoFront& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write front `" + path + "`");
    out.precision(17);
    out << "# arn-front 1\n";
    for (const auto& e : f.entries) {
        out << "entry " << e.complexity << ' ' << e.loss << '\n';
        out << dsl::pretty_print(e.program) << '\n';
        out << "end\n";
    }
}

ParetoFront load_front(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open front `" + path + "`");
    ParetoFront f;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::istringstream hdr(line);
        std::string tag;
        FrontEntry e;
        if (!(hdr >> tag >> e.complexity >> e.loss) || tag != "entry")
            throw std::runtime_error("front `" + path + "`: malformed entry header: " + line);
        std::string source;
        bool closed = false;
        while (std::getline(in, line)) {
            if (line == "end") {
                closed = true;
                break;
            }
            source += line;
            source += '\n';
        }
        if (!closed) throw std::runtime_error("front `" + path + "`: unterminated entry");
        e.program = dsl::parse(source);
        if (!f.update(std::move(e)))
            throw std::runtime_error("front `" + path + "`: entries are not a valid front");
    }
    return f;
}

// ---------------------------------------------------------------------------
// mutation

namespace {

// Structural clone that swaps `target` (by identity) for `repl`.
dsl::ExprPtr replace_node(const dsl::ExprPtr& e, const dsl::Expr* target,
                          const dsl::ExprPtr& repl) {
    using namespace dsl;
    if (e.get() == target) return repl;
    auto r = [&](const ExprPtr& c) { return replace_node(c, target, repl); };
    if (const auto* b = e->as<Bin>()) return make_expr(Bin{b->op, r(b->lhs), r(b->rhs)});
    if (const auto* a = e->as<Act>()) return make_expr(Act{a->fn, r(a->arg)});
    if (const auto* lc = e->as<LinCombApply>())
        return make_expr(LinCombApply{lc->mapping, r(lc->list)});
    if (const auto* c = e->as<Cons>()) return make_expr(Cons{r(c->head), r(c->tail)});
    if (const auto* cs = e->as<Case>())
        return make_expr(Case{r(cs->scrutinee), cs->pattern, r(cs->body)});
    if (const auto* lf = e->as<LetFun>())
        return make_expr(LetFun{lf->name, lf->param, r(lf->fnBody), r(lf->body)});
    if (const auto* ap = e->as<Apply>()) return make_expr(Apply{ap->fn, r(ap->arg)});
    if (const auto* t = e->as<Tuple>()) {
        Tuple out;
        for (const auto& el : t->elems) out.elems.push_back(r(el));
        return make_expr(std::move(out));
    }
    return e;  // leaf other than the target
}

dsl::ExprPtr random_scalar_expr(std::mt19937_64& rng, int depth) {
    using namespace dsl;
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 3 : 1);
    switch (pick(rng)) {
        case 0: {  // scalar parameter
            static const char* scalars[] = {"SelfPeep0", "SelfPeep1", "SelfPeep2", "SelfPeep3",
                                            "SelfOutput"};
            std::uniform_int_distribution<int> v(0, 4);
            return make_expr(Var{scalars[v(rng)]});
        }
        case 1: {  // constant
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            return make_expr(RealConst{u(rng), ""});
        }
        case 2: {  // unary: activation or weighted list reduction
            std::uniform_int_distribution<int> which(0, 3);
            int w = which(rng);
            if (w == 3) {
                static const char* lists[] = {"InputsLC", "OtherPeepsLC", "OtherOutputsLC"};
                std::uniform_int_distribution<int> m(0, 4), lv(0, 2);
                return make_expr(
                    LinCombApply{m(rng), make_expr(Var{lists[lv(rng)]})});
            }
            static const ActFn fns[] = {ActFn::Tanh, ActFn::Relu, ActFn::Srelu};
            return make_expr(Act{fns[w], random_scalar_expr(rng, depth - 1)});
        }
        default: {  // binary operator
            static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div};
            std::uniform_int_distribution<int> o(0, 3);
            return make_expr(Bin{ops[o(rng)], random_scalar_expr(rng, depth - 1),
                                 random_scalar_expr(rng, depth - 1)});
        }
    }
}

template <class Pred>
std::vector<const dsl::Expr*> collect(const dsl::ExprPtr& root, Pred pred) {
    std::vector<const dsl::Expr*> out;
    dsl::visit(root, [&](const dsl::ExprPtr& e) {
        if (pred(e)) out.push_back(e.get());
    });
    return out;
}

bool try_mutation(const dsl::NeuronProgram& parent, const dsl::TypedProgram& typed,
                  std::mt19937_64& rng, dsl::NeuronProgram& out, std::string& tag) {
    using namespace dsl;
    std::uniform_int_distribution<int> which(0, 3);
    const ExprPtr& body = parent.body;
    switch (which(rng)) {
        case 0: {  // grow a fresh scalar subexpression
            auto sites = collect(body, [&](const ExprPtr& e) {
                auto it = typed.types.find(e.get());
                return it != typed.types.end() && it->second == Type::scalar();
            });
            if (sites.empty()) return false;
            std::uniform_int_distribution<size_t> s(0, sites.size() - 1);
            out.body = replace_node(body, sites[s(rng)], random_scalar_expr(rng, 3));
            tag = "grow";
            return true;
        }
        case 1: {  // perturb a constant
            auto sites = collect(body, [](const ExprPtr& e) { return e->is<RealConst>(); });
            if (sites.empty()) return false;
            std::uniform_int_distribution<size_t> s(0, sites.size() - 1);
            const Expr* site = sites[s(rng)];
            double v = site->as<RealConst>()->value;
            std::normal_distribution<double> noise(0.0, std::max(0.1, 0.1 * std::abs(v)));
            out.body = replace_node(body, site, make_expr(RealConst{v + noise(rng), ""}));
            tag = "const";
            return true;
        }
        case 2: {  // swap an activation
            auto sites = collect(body, [](const ExprPtr& e) { return e->is<Act>(); });
            if (sites.empty()) return false;
            std::uniform_int_distribution<size_t> s(0, sites.size() - 1);
            const Expr* site = sites[s(rng)];
            // evolution only emits tanh/relu/srelu, never sigmoid
            std::vector<ActFn> alts;
            for (ActFn fn : {ActFn::Tanh, ActFn::Relu, ActFn::Srelu})
                if (fn != site->as<Act>()->fn) alts.push_back(fn);
            std::uniform_int_distribution<size_t> a(0, alts.size() - 1);
            out.body =
                replace_node(body, site, make_expr(Act{alts[a(rng)], site->as<Act>()->arg}));
            tag = "act";
            return true;
        }
        default: {  // rewire one state slot of a result quintuple
            auto sites = collect(body, [&](const ExprPtr& e) {
                auto it = typed.types.find(e.get());
                return e->is<Tuple>() && it != typed.types.end() && it->second == Type::tuple(5);
            });
            if (sites.empty()) return false;
            std::uniform_int_distribution<size_t> s(0, sites.size() - 1);
            const Expr* site = sites[s(rng)];
            const auto& elems = site->as<Tuple>()->elems;
            std::uniform_int_distribution<int> slot(0, 3);
            int k = slot(rng);
            // new wiring: another element of the tuple or a bare parameter
            std::uniform_int_distribution<int> src(0, 5);
            int j = src(rng);
            ExprPtr wire;
            if (j < 5 && j != k) {
                wire = elems[j];
            } else {
                static const char* scalars[] = {"SelfPeep0", "SelfPeep1", "SelfPeep2",
                                                "SelfPeep3", "SelfOutput"};
                std::uniform_int_distribution<int> v(0, 4);
                wire = make_expr(Var{scalars[v(rng)]});
            }
            if (wire.get() == elems[k].get()) return false;
            Tuple replacement;
            replacement.elems = elems;
            replacement.elems[k] = wire;
            out.body = replace_node(body, site, make_expr(std::move(replacement)));
            tag = "rewire";
            return true;
        }
    }
}

}  // namespace

dsl::NeuronProgram mutate(const dsl::NeuronProgram& parent, std::mt19937_64& rng,
                          std::string* tag) {
    dsl::TypedProgram typed = dsl::typecheck(parent);
    for (int attempt = 0; attempt < 20; ++attempt) {
        dsl::NeuronProgram child;
        child.name = parent.name;
        std::string t;
        if (!try_mutation(parent, typed, rng, child, t)) continue;
        try {
            dsl::typecheck(child);
        } catch (const dsl::TypeError&) {
            continue;
        }
        if (dsl::equal(child, parent)) continue;
        if (tag) *tag = t;
        return child;
    }
    if (tag) *tag = "copy";
    return parent;
}

// ---------------------------------------------------------------------------
// staged evaluation

namespace {

data::Dataset truncated(const data::Dataset& d, int timesteps) {
    if (timesteps <= 0 || timesteps >= d.n_t) return d;
    data::Dataset out = d;
    out.n_t = timesteps;
    return out;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

double evaluate_stage(const dsl::NeuronProgram& p, const StageSpec& stage,
                      const data::Dataset& train_set, const data::Dataset& validation,
                      const train::TrainConfig& base, std::uint64_t seed, std::string* diag) {
    try {
        auto typed = dsl::typecheck(p);
        auto kernel = compiler::compile(typed, stage.nodes, train_set.n_in);
        auto net = model::make_network(std::move(kernel), train_set.task, train_set.n_out);

        train::TrainConfig cfg = base;
        cfg.totalExamples = stage.examples;
        cfg.seed = seed;
        data::Dataset tr = truncated(train_set, stage.timesteps);
        data::Dataset va = truncated(validation, stage.timesteps);
        auto res = train::train(net, cfg, tr, va);
        return res.diverged ? kInf : res.best_validation;
    } catch (const std::exception& e) {
        if (diag) *diag = e.what();
        return kInf;
    }
}

// ---------------------------------------------------------------------------
// the evolutionary loop

ParetoFront evolve_run(const dsl::NeuronProgram& seedProgram, const StagePlan& plan,
                       const EvolveConfig& cfg, const data::Dataset& train_set,
                       const data::Dataset& validation, ParetoFront resume) {
    if (plan.stages.empty()) throw std::invalid_argument("stage plan has no stages");

    std::ofstream audit;
    if (!cfg.auditPath.empty()) {
        audit.open(cfg.auditPath);
        if (!audit) throw std::runtime_error("cannot write audit log `" + cfg.auditPath + "`");
        audit << "# arn-evolve-audit 1\n";
        audit.precision(17);
    }

    ParetoFront front = std::move(resume);
    std::mt19937_64 rng(cfg.seed);
    long nextId = 0;
    std::unordered_map<std::string, long> frontIds;  // printed program -> candidate id

    // Evaluates candidates [0, n) of a generation at one stage on the
    // worker pool; results land indexed so consumption order is fixed.
    auto run_stage = [&](std::vector<Candidate>& gen_cands, const std::vector<int>& active,
                         int stageIdx, int generation) {
        const StageSpec& stage = plan.stages[stageIdx];
        std::atomic<size_t> next{0};
        auto work = [&] {
            for (size_t i = next.fetch_add(1); i < active.size(); i = next.fetch_add(1)) {
                Candidate& c = gen_cands[active[i]];
                std::uint64_t s = mix(cfg.seed, mix(generation, mix(c.id, stageIdx)));
                double loss = evaluate_stage(c.program, stage, train_set, validation, cfg.base, s,
                                             &c.diagnostic);
                c.stageLoss.push_back(loss);
            }
        };
        int workers = std::max(1, cfg.workers);
        if (workers == 1 || active.size() <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }
    };

    auto screen_generation = [&](std::vector<Candidate>& cands, int generation) {
        std::vector<int> active(cands.size());
        for (size_t i = 0; i < cands.size(); ++i) active[i] = static_cast<int>(i);
        for (int st = 0; st < static_cast<int>(plan.stages.size()); ++st) {
            run_stage(cands, active, st, generation);
            if (st + 1 == static_cast<int>(plan.stages.size())) break;
            // generation-relative ranking: the top passFraction advance
            std::vector<int> finite;
            for (int i : active)
                if (std::isfinite(cands[i].stageLoss.back())) finite.push_back(i);
            size_t keep = std::max<size_t>(
                1, static_cast<size_t>(std::floor(plan.passFraction * cands.size())));
            keep = std::min(keep, finite.size());
            std::stable_sort(finite.begin(), finite.end(), [&](int a, int b) {
                return cands[a].stageLoss.back() < cands[b].stageLoss.back();
            });
            finite.resize(keep);
            std::sort(finite.begin(), finite.end());
            active = std::move(finite);
            if (active.empty()) break;
        }
        // finishers of the deepest stage are front-eligible
        std::vector<int> done;
        for (int i : active)
            if (cands[i].stageLoss.size() == plan.stages.size()) done.push_back(i);
        return done;
    };

    auto log_candidate = [&](const Candidate& c) {
        if (!audit.is_open()) return;
        audit << "candidate " << c.id << " parent " << c.parent << " op " << c.transformation
              << " complexity " << c.complexity;
        audit << " stages";
        for (double v : c.stageLoss) audit << ' ' << v;
        if (!c.diagnostic.empty()) {
            std::string d = c.diagnostic;
            std::replace(d.begin(), d.end(), '\n', ' ');
            audit << " error \"" << d << '"';
        }
        audit << '\n';
    };

    // generation 0: the seed alone (plus any resumed front, already final)
    {
        std::vector<Candidate> gen0(1);
        gen0[0].program = seedProgram;
        gen0[0].complexity = dsl::complexity(seedProgram);
        gen0[0].id = nextId++;
        gen0[0].transformation = "seed";
        auto done = screen_generation(gen0, 0);
        log_candidate(gen0[0]);
        for (int i : done)
            if (front.update({gen0[i].complexity, gen0[i].value(), gen0[i].program}))
                frontIds[dsl::pretty_print(gen0[i].program)] = gen0[i].id;
        if (!cfg.frontSnapshotPath.empty()) save_front(front, cfg.frontSnapshotPath);
    }

    for (int g = 1; g <= cfg.generations; ++g) {
        // parents: current front members, else fall back to the seed
        std::vector<std::pair<const dsl::NeuronProgram*, long>> parents;
        for (const auto& e : front.entries) {
            auto it = frontIds.find(dsl::pretty_print(e.program));
            parents.emplace_back(&e.program, it == frontIds.end() ? -1 : it->second);
        }
        if (parents.empty()) parents.emplace_back(&seedProgram, 0);

        std::vector<Candidate> cands(cfg.populationSize);
        for (int i = 0; i < cfg.populationSize; ++i) {
            std::uniform_int_distribution<size_t> pick(0, parents.size() - 1);
            auto [parent, pid] = parents[pick(rng)];
            Candidate& c = cands[i];
            c.program = mutate(*parent, rng, &c.transformation);
            c.complexity = dsl::complexity(c.program);
            c.id = nextId++;
            c.parent = pid;
        }
        auto done = screen_generation(cands, g);
        for (const auto& c : cands) log_candidate(c);
        for (int i : done)
            if (front.update({cands[i].complexity, cands[i].value(), cands[i].program}))
                frontIds[dsl::pretty_print(cands[i].program)] = cands[i].id;
        if (!cfg.frontSnapshotPath.empty()) save_front(front, cfg.frontSnapshotPath);
    }
    return front;
}

}  // namespace arn::evolve
