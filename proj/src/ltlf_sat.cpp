#include "ltlfmuc/ltlf_sat.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_map>
#include <unordered_set>

namespace ltlfmuc {
namespace {

// An alternative way to discharge an obligation at the current position:
// the formulas deferred to the next position, plus whether any deferral is
// strong (a strong deferral cannot be discharged by ending the trace).
struct Alt {
    std::vector<FormulaId> defers;  // sorted, deduped
    bool strong = false;
};

using AltList = std::vector<Alt>;

void sort_unique(std::vector<FormulaId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Keeps one entry per deferral set (weak wins) and drops alternatives that
// strictly dominate another: a superset with no better strength can only
// accept fewer suffixes.
void normalize(AltList& alts) {
    std::sort(alts.begin(), alts.end(), [](const Alt& a, const Alt& b) {
        if (a.defers != b.defers) return a.defers < b.defers;
        return a.strong < b.strong;
    });
    AltList out;
    for (Alt& a : alts) {
        if (!out.empty() && out.back().defers == a.defers) continue;
        out.push_back(std::move(a));
    }
    auto subsumes = [](const Alt& small, const Alt& big) {
        if (small.strong && !big.strong) return false;
        return std::includes(big.defers.begin(), big.defers.end(),
                             small.defers.begin(), small.defers.end());
    };
    // Flags first: moving an element while others still compare against it
    // would make the empty moved-from set subsume everything.
    std::vector<bool> dominated(out.size(), false);
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < out.size() && !dominated[i]; ++j)
            if (i != j && subsumes(out[j], out[i]) &&
                !(out[j].defers == out[i].defers && out[j].strong == out[i].strong))
                dominated[i] = true;
    AltList kept;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!dominated[i]) kept.push_back(std::move(out[i]));
    alts = std::move(kept);
}

AltList product(const AltList& lhs, const AltList& rhs) {
    AltList out;
    out.reserve(lhs.size() * rhs.size());
    for (const Alt& a : lhs)
        for (const Alt& b : rhs) {
            Alt c;
            c.defers.reserve(a.defers.size() + b.defers.size());
            std::merge(a.defers.begin(), a.defers.end(), b.defers.begin(),
                       b.defers.end(), std::back_inserter(c.defers));
            c.defers.erase(std::unique(c.defers.begin(), c.defers.end()),
                           c.defers.end());
            c.strong = a.strong || b.strong;
            out.push_back(std::move(c));
        }
    normalize(out);
    return out;
}

// Expands an NNF formula against the current assignment: the returned
// alternatives enumerate every way sigma can contribute to the formula,
// each with its residual.  An empty list means sigma refutes the formula
// outright.
class Expander {
public:
    Expander(const FormulaArena& arena, const std::vector<bool>& sigma)
        : arena_(arena), sigma_(sigma) {}

    const AltList& expand(FormulaId f) {
        auto it = memo_.find(f);
        if (it != memo_.end()) return it->second;
        AltList out;
        const FormulaNode& n = arena_.node(f);
        switch (n.kind) {
            case NodeKind::Atom:
                if (n.atom < sigma_.size() && sigma_[n.atom])
                    out.push_back(Alt{});
                break;
            case NodeKind::True:
                out.push_back(Alt{});
                break;
            case NodeKind::False:
                break;
            case NodeKind::Not: {
                // NNF: negation occurs on atoms only.
                const FormulaNode& c = arena_.node(n.child[0]);
                assert(c.kind == NodeKind::Atom);
                if (!(c.atom < sigma_.size() && sigma_[c.atom]))
                    out.push_back(Alt{});
                break;
            }
            case NodeKind::And:
                out = product(expand(n.child[0]), expand(n.child[1]));
                break;
            case NodeKind::Or: {
                out = expand(n.child[0]);
                const AltList& r = expand(n.child[1]);
                out.insert(out.end(), r.begin(), r.end());
                normalize(out);
                break;
            }
            case NodeKind::Next:
                out.push_back(Alt{{n.child[0]}, true});
                break;
            case NodeKind::WeakNext:
                out.push_back(Alt{{n.child[0]}, false});
                break;
            case NodeKind::Until: {
                // g now, or f now and the whole Until again next.
                out = expand(n.child[1]);
                AltList cont = expand(n.child[0]);
                for (Alt& a : cont) {
                    a.defers.push_back(f);
                    sort_unique(a.defers);
                    a.strong = true;
                }
                out.insert(out.end(), cont.begin(), cont.end());
                normalize(out);
                break;
            }
            case NodeKind::Release: {
                // g now, and either f now (released) or the Release again
                // next; the deferral is weak since the trace may just end.
                AltList releaser = expand(n.child[0]);
                releaser.push_back(Alt{{f}, false});
                normalize(releaser);
                out = product(expand(n.child[1]), releaser);
                break;
            }
            default:
                assert(!"expansion requires desugared NNF input");
        }
        return memo_.emplace(f, std::move(out)).first->second;
    }

    AltList expand_set(const std::vector<FormulaId>& obligations) {
        AltList acc{Alt{}};
        for (FormulaId f : obligations) {
            acc = product(acc, expand(f));
            if (acc.empty()) break;
        }
        return acc;
    }

private:
    const FormulaArena& arena_;
    const std::vector<bool>& sigma_;
    std::unordered_map<FormulaId, AltList> memo_;
};

struct SetHash {
    std::size_t operator()(const std::vector<FormulaId>& v) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (FormulaId f : v) h = (h ^ f) * 0x100000001b3ull;
        return static_cast<std::size_t>(h);
    }
};

// Normalized obligation set: drop truth, die on falsity.
std::optional<std::vector<FormulaId>> make_obligation_set(
    const FormulaArena& arena, std::vector<FormulaId> v) {
    std::vector<FormulaId> out;
    for (FormulaId f : v) {
        NodeKind k = arena.kind(f);
        if (k == NodeKind::True) continue;
        if (k == NodeKind::False) return std::nullopt;
        out.push_back(f);
    }
    sort_unique(out);
    return out;
}

std::vector<AtomId> atoms_of_set(const FormulaArena& arena,
                                 const std::vector<FormulaId>& set) {
    std::vector<AtomId> atoms;
    for (FormulaId f : set) arena.collect_atoms(f, atoms);
    return atoms;
}

} // namespace

SatOutcome check_satisfiability(FormulaArena& arena,
                                std::span<const FormulaId> psi,
                                const LtlfLimits& limits,
                                const std::atomic<bool>* interrupt) {
    if (psi.empty())
        throw std::invalid_argument("check_satisfiability needs a conjunct");

    std::vector<FormulaId> roots;
    for (FormulaId f : psi) roots.push_back(arena.nnf(arena.desugar(f)));

    // Closure size for the state cap: distinct reachable NNF nodes.
    std::uint64_t closure_size = 0;
    {
        std::unordered_set<FormulaId> seen;
        std::vector<FormulaId> stack(roots.begin(), roots.end());
        while (!stack.empty()) {
            FormulaId f = stack.back();
            stack.pop_back();
            if (!seen.insert(f).second) continue;
            const FormulaNode& n = arena.node(f);
            for (FormulaId c : {n.child[0], n.child[1]})
                if (c != kInvalidFormula) stack.push_back(c);
        }
        closure_size = seen.size();
    }
    SatOutcome out{SatOutcome::Kind::Unsat, 0, std::nullopt, 0, 0};
    out.state_cap = closure_size >= 63 ? ~std::uint64_t{0}
                                       : (std::uint64_t{1} << closure_size);

    auto initial = make_obligation_set(arena, roots);
    if (!initial) return out;  // a conjunct is constant false

    struct StateInfo {
        std::vector<FormulaId> set;
        std::int64_t parent;           // index into states, -1 for the root
        std::vector<AtomId> sigma;     // symbol consumed reaching this state
    };
    std::vector<StateInfo> states;
    std::unordered_map<std::vector<FormulaId>, std::size_t, SetHash> index_of;
    states.push_back({*initial, -1, {}});
    index_of.emplace(*initial, 0);

    std::vector<std::size_t> frontier{0};
    std::vector<bool> sigma_bits(arena.atom_count(), false);

    auto build_witness = [&](std::size_t state_idx,
                             const std::vector<AtomId>& final_sigma) {
        std::vector<std::vector<AtomId>> symbols{final_sigma};
        for (std::int64_t i = static_cast<std::int64_t>(state_idx);
             states[i].parent >= 0; i = states[i].parent)
            symbols.push_back(states[i].sigma);
        std::reverse(symbols.begin(), symbols.end());
        Trace pi(arena.atom_count(), symbols.size());
        for (std::size_t t = 0; t < symbols.size(); ++t)
            for (AtomId a : symbols[t]) pi.set(t, a);
        return pi;
    };

    while (!frontier.empty()) {
        std::vector<std::size_t> next_frontier;
        for (std::size_t si : frontier) {
            if (interrupt && interrupt->load(std::memory_order_relaxed)) {
                out.kind = SatOutcome::Kind::Interrupted;
                out.states_explored = states.size();
                return out;
            }
            const std::vector<AtomId> atoms = atoms_of_set(arena, states[si].set);
            const std::size_t n_atoms = atoms.size();
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n_atoms);
                 ++mask) {
                std::vector<AtomId> sigma;
                for (std::size_t b = 0; b < n_atoms; ++b)
                    if (mask & (std::uint64_t{1} << b)) {
                        sigma.push_back(atoms[b]);
                        sigma_bits[atoms[b]] = true;
                    }
                Expander ex(arena, sigma_bits);
                AltList alts = ex.expand_set(states[si].set);
                for (AtomId a : sigma) sigma_bits[a] = false;

                for (const Alt& alt : alts) {
                    if (!alt.strong) {
                        // Discharged with the trace ending here.
                        out.kind = SatOutcome::Kind::Sat;
                        out.length = 1;
                        for (std::int64_t i = static_cast<std::int64_t>(si);
                             states[i].parent >= 0; i = states[i].parent)
                            ++out.length;
                        out.witness = build_witness(si, sigma);
                        out.states_explored = states.size();
#ifndef NDEBUG
                        for (FormulaId f : psi)
                            assert(evaluate(arena, *out.witness, f, 0));
#endif
                        return out;
                    }
                }
                for (const Alt& alt : alts) {
                    auto succ = make_obligation_set(arena, alt.defers);
                    if (!succ) continue;
                    if (index_of.count(*succ)) continue;
                    if (states.size() >= limits.state_budget) {
                        out.kind = SatOutcome::Kind::BudgetExceeded;
                        out.states_explored = states.size();
                        return out;
                    }
                    index_of.emplace(*succ, states.size());
                    next_frontier.push_back(states.size());
                    states.push_back({std::move(*succ),
                                      static_cast<std::int64_t>(si), sigma});
                }
            }
        }
        frontier = std::move(next_frontier);
    }
    out.kind = SatOutcome::Kind::Unsat;
    out.states_explored = states.size();
    assert(out.states_explored <= out.state_cap);
    return out;
}

// ── progression over determinized states ────────────────────────────────────

ObligationState ObligationState::initial(FormulaArena& arena,
                                         std::span<const FormulaId> psi) {
    std::vector<FormulaId> roots;
    for (FormulaId f : psi) roots.push_back(arena.nnf(arena.desugar(f)));
    ObligationState s;
    if (auto set = make_obligation_set(arena, std::move(roots)))
        s.alternatives_.push_back(std::move(*set));
    return s;
}

ProgressResult progress(FormulaArena& arena, const ObligationState& state,
                        std::span<const AtomId> sigma, bool is_last) {
    std::vector<bool> sigma_bits(arena.atom_count(), false);
    for (AtomId a : sigma) {
        if (a >= sigma_bits.size())
            throw std::out_of_range("unknown atom in sigma");
        sigma_bits[a] = true;
    }
    Expander ex(arena, sigma_bits);

    std::vector<std::vector<FormulaId>> next_sets;
    for (const auto& obligation : state.alternatives()) {
        AltList alts = ex.expand_set(obligation);
        for (const Alt& alt : alts) {
            if (is_last) {
                if (!alt.strong) return {ProgressKind::Accept, {}};
            } else if (auto succ = make_obligation_set(arena, alt.defers)) {
                next_sets.push_back(std::move(*succ));
            }
        }
    }
    if (is_last) return {ProgressKind::Reject, {}};
    if (next_sets.empty()) return {ProgressKind::Reject, {}};

    // Canonical antichain: dedupe, then drop supersets of other members.
    std::sort(next_sets.begin(), next_sets.end());
    next_sets.erase(std::unique(next_sets.begin(), next_sets.end()),
                    next_sets.end());
    std::vector<bool> dominated(next_sets.size(), false);
    for (std::size_t i = 0; i < next_sets.size(); ++i)
        for (std::size_t j = 0; j < next_sets.size() && !dominated[i]; ++j)
            if (i != j &&
                std::includes(next_sets[i].begin(), next_sets[i].end(),
                              next_sets[j].begin(), next_sets[j].end()) &&
                next_sets[i] != next_sets[j])
                dominated[i] = true;
    std::vector<std::vector<FormulaId>> kept;
    for (std::size_t i = 0; i < next_sets.size(); ++i)
        if (!dominated[i]) kept.push_back(std::move(next_sets[i]));
    ProgressResult r{ProgressKind::Continue, {}};
    r.next.alternatives_ = std::move(kept);
    return r;
}

} // namespace ltlfmuc
