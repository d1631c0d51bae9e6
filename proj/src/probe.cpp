#include "ltlfmuc/probe.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_set>

namespace ltlfmuc {

namespace {
std::uint64_t holds_key(std::size_t t, FormulaId f) {
    return (static_cast<std::uint64_t>(t) << 32) | f;
}
} // namespace

sat::Lit Probe::holds_lit(std::size_t t, FormulaId f) const {
    return holds_.at(holds_key(t, f));
}

sat::Lit Probe::fresh_lit() { return sat::mk_lit(solver_.new_var()); }

Probe::Probe(const ConjunctiveSpec& spec, unsigned k, ProbeLimits limits)
    : spec_(&spec), k_(k), n_(spec.size()) {
    if (k == 0) throw std::invalid_argument("probe depth must be at least 1");
    FormulaArena& arena = spec.arena();

    desugared_.reserve(n_);
    for (FormulaId c : spec.conjuncts()) desugared_.push_back(arena.desugar(c));

    // Children-first order over the union DAG; every composite at time t can
    // then be defined with its children at t and its own unfolding at t+1
    // already available, without recursing.
    {
        std::unordered_set<FormulaId> done;
        std::vector<std::pair<FormulaId, bool>> stack;
        for (FormulaId c : desugared_) stack.push_back({c, false});
        while (!stack.empty()) {
            auto [f, expanded] = stack.back();
            stack.pop_back();
            if (done.count(f)) continue;
            if (expanded) {
                done.insert(f);
                topo_.push_back(f);
                continue;
            }
            stack.push_back({f, true});
            const FormulaNode& node = arena.node(f);
            for (FormulaId ch : {node.child[0], node.child[1]})
                if (ch != kInvalidFormula && !done.count(ch))
                    stack.push_back({ch, false});
        }
    }

    alphabet_.assign(spec.alphabet().begin(), spec.alphabet().end());
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
        atom_index_.emplace(alphabet_[i], i);

    // k positions of (subformulas + trace atoms), the last markers and their
    // sequential-counter helpers, the selectors, and the truth constant.
    const std::uint64_t estimate =
        std::uint64_t{k} * (topo_.size() + alphabet_.size() + 2) + n_ + 1;
    if (estimate > limits.var_budget)
        throw ResourceLimitError(
            "probe would need about " + std::to_string(estimate) +
            " variables, over the budget of " + std::to_string(limits.var_budget));
    solver_.set_propagation_budget(limits.propagation_budget);

    true_lit_ = fresh_lit();
    solver_.add_clause({true_lit_});

    trace_var_.resize(std::size_t{k} * alphabet_.size());
    for (auto& v : trace_var_) v = solver_.new_var();
    last_var_.resize(k);
    for (auto& v : last_var_) v = solver_.new_var();

    // Exactly one last(t): one at-least-one clause plus a sequential
    // at-most-one ladder.
    {
        std::vector<sat::Lit> alo;
        for (auto v : last_var_) alo.push_back(sat::mk_lit(v));
        solver_.add_clause(alo);
        if (k > 1) {
            std::vector<sat::Var> s(k - 1);
            for (auto& v : s) v = solver_.new_var();
            for (std::size_t t = 0; t + 1 < k; ++t) {
                solver_.add_clause({sat::mk_lit(last_var_[t], true), sat::mk_lit(s[t])});
                if (t > 0)
                    solver_.add_clause({sat::mk_lit(s[t - 1], true), sat::mk_lit(s[t])});
                if (t > 0)
                    solver_.add_clause({sat::mk_lit(last_var_[t], true),
                                        sat::mk_lit(s[t - 1], true)});
            }
            solver_.add_clause({sat::mk_lit(last_var_[k - 1], true),
                                sat::mk_lit(s[k - 2], true)});
        }
    }

    // Times are filled from the end so that h(t+1, f) exists when h(t, f)
    // is defined.
    for (std::size_t t = k; t-- > 0;)
        for (FormulaId f : topo_) define_node(t, f);

    selector_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        selector_[i] = solver_.new_var();
        solver_.register_assumable(sat::mk_lit(selector_[i]));
        solver_.add_clause({sat::mk_lit(selector_[i], true),
                            holds_lit(0, desugared_[i])});
    }
}

// Installs the biconditional definition of h(t, f).  Literal-shaped cases
// (atoms, the constant, negation, and the end-of-trace unfoldings of Next
// and Until) are aliases, not fresh variables.
void Probe::define_node(std::size_t t, FormulaId f) {
    const std::uint64_t key = holds_key(t, f);
    if (holds_.count(key)) return;
    FormulaArena& arena = spec_->arena();
    const FormulaNode& node = arena.node(f);
    const bool at_end = t + 1 == k_;
    const sat::Lit last = sat::mk_lit(last_var_[t]);

    switch (node.kind) {
        case NodeKind::Atom:
            holds_[key] = sat::mk_lit(
                trace_var_[t * alphabet_.size() + atom_index_.at(node.atom)]);
            return;
        case NodeKind::True:
            holds_[key] = true_lit_;
            return;
        case NodeKind::Not:
            holds_[key] = ~holds_lit(t, node.child[0]);
            return;
        case NodeKind::And: {
            sat::Lit v = fresh_lit();
            sat::Lit a = holds_lit(t, node.child[0]);
            sat::Lit b = holds_lit(t, node.child[1]);
            solver_.add_clause({~v, a});
            solver_.add_clause({~v, b});
            solver_.add_clause({v, ~a, ~b});
            holds_[key] = v;
            return;
        }
        case NodeKind::Or: {
            sat::Lit v = fresh_lit();
            sat::Lit a = holds_lit(t, node.child[0]);
            sat::Lit b = holds_lit(t, node.child[1]);
            solver_.add_clause({~v, a, b});
            solver_.add_clause({v, ~a});
            solver_.add_clause({v, ~b});
            holds_[key] = v;
            return;
        }
        case NodeKind::Next: {
            // h(t, X f) <-> !last(t) & h(t+1, f); beyond the horizon the
            // successor is treated as false, collapsing the whole thing.
            if (at_end) {
                holds_[key] = ~true_lit_;
                return;
            }
            sat::Lit v = fresh_lit();
            sat::Lit w = holds_lit(t + 1, node.child[0]);
            solver_.add_clause({~v, ~last});
            solver_.add_clause({~v, w});
            solver_.add_clause({v, last, ~w});
            holds_[key] = v;
            return;
        }
        case NodeKind::Until: {
            // h(t, f U g) <-> h(t,g) | (h(t,f) & !last(t) & h(t+1, f U g));
            // at the horizon only the g disjunct survives.
            sat::Lit g = holds_lit(t, node.child[1]);
            if (at_end) {
                holds_[key] = g;
                return;
            }
            sat::Lit v = fresh_lit();
            sat::Lit fl = holds_lit(t, node.child[0]);
            sat::Lit w = holds_lit(t + 1, f);
            solver_.add_clause({~v, g, fl});
            solver_.add_clause({~v, g, ~last});
            solver_.add_clause({~v, g, w});
            solver_.add_clause({v, ~g});
            solver_.add_clause({v, ~fl, last, ~w});
            holds_[key] = v;
            return;
        }
        case NodeKind::Release: {
            // h(t, f R g) <-> h(t,g) & (h(t,f) | last(t) | h(t+1, f R g)).
            sat::Lit v = fresh_lit();
            sat::Lit fl = holds_lit(t, node.child[0]);
            sat::Lit g = holds_lit(t, node.child[1]);
            if (at_end) {
                solver_.add_clause({~v, g});
                solver_.add_clause({~v, fl, last});
                solver_.add_clause({v, ~g, ~fl});
                solver_.add_clause({v, ~g, ~last});
            } else {
                sat::Lit w = holds_lit(t + 1, f);
                solver_.add_clause({~v, g});
                solver_.add_clause({~v, fl, last, w});
                solver_.add_clause({v, ~g, ~fl});
                solver_.add_clause({v, ~g, ~last});
                solver_.add_clause({v, ~g, ~w});
            }
            holds_[key] = v;
            return;
        }
        default:
            assert(!"probe requires desugared conjuncts");
    }
}

Trace Probe::decode_witness(std::size_t length) const {
    Trace pi(spec_->arena().atom_count(), length);
    for (std::size_t t = 0; t < length; ++t)
        for (std::size_t a = 0; a < alphabet_.size(); ++a)
            if (solver_.model_value(sat::mk_lit(trace_var_[t * alphabet_.size() + a])))
                pi.set(t, alphabet_[a]);
    return pi;
}

ProbeResult Probe::query(const SelectorSet& s) {
    std::vector<sat::Lit> assumptions;
    assumptions.reserve(s.size());
    for (std::size_t i : s) {
        if (i < 1 || i > n_)
            throw std::out_of_range("selector index out of range");
        assumptions.push_back(sat::mk_lit(selector_[i - 1]));
    }
    sat::SolveResult r = solver_.solve(assumptions);
    switch (r.status) {
        case sat::SolveStatus::Sat: {
            std::size_t length = 0;
            for (std::size_t t = 0; t < k_; ++t)
                if (solver_.model_value(sat::mk_lit(last_var_[t]))) {
                    length = t + 1;
                    break;
                }
            assert(length >= 1);
            ProbeResult res{ProbeResult::Kind::Sat, decode_witness(length), length, {}};
#ifndef NDEBUG
            for (std::size_t i : s)
                assert(evaluate(spec_->arena(), *res.witness, spec_->conjunct(i), 0));
#endif
            return res;
        }
        case sat::SolveStatus::Unsat: {
            SelectorSet core;
            for (sat::Lit p : r.core)
                for (std::size_t i = 0; i < n_; ++i)
                    if (sat::var_of(p) == selector_[i]) core.push_back(i + 1);
            std::sort(core.begin(), core.end());
            core.erase(std::unique(core.begin(), core.end()), core.end());
            return {ProbeResult::Kind::Unsat, std::nullopt, 0, std::move(core)};
        }
        case sat::SolveStatus::Interrupted:
            return {ProbeResult::Kind::Interrupted, std::nullopt, 0, {}};
        case sat::SolveStatus::BudgetExceeded:
            return {ProbeResult::Kind::BudgetExceeded, std::nullopt, 0, {}};
    }
    assert(false);
    return {ProbeResult::Kind::Unsat, std::nullopt, 0, {}};
}

} // namespace ltlfmuc
