#include "ltlfmuc/sat.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

namespace ltlfmuc::sat {

namespace {
constexpr std::uint32_t kNoPos = 0xffffffffu;

// Luby restart sequence (1,1,2,1,1,2,4,...) scaled by the base interval.
std::uint64_t luby(std::uint64_t x) {
    std::uint64_t size = 1, seq = 0;
    while (size < x + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x %= size;
    }
    return std::uint64_t{1} << seq;
}
} // namespace

struct Solver::Clause {
    float act = 0.0f;
    bool learnt = false;
    std::vector<Lit> lits;
};

Solver::Solver() = default;

Solver::~Solver() {
    for (Clause* c : clauses_) delete c;
    for (Clause* c : learnts_) delete c;
}

Var Solver::new_var() {
    Var v = static_cast<Var>(assigns_.size());
    assigns_.push_back(LBool::Undef);
    polarity_.push_back(default_polarity_);
    assumable_.push_back(false);
    activity_.push_back(0.0);
    level_.push_back(0);
    reason_.push_back(nullptr);
    seen_.push_back(false);
    heap_pos_.push_back(kNoPos);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v;
}

void Solver::register_assumable(Lit p) { assumable_[var_of(p)] = true; }

void Solver::set_default_polarity(bool value) {
    default_polarity_ = value;
    std::fill(polarity_.begin(), polarity_.end(), value);
}

bool Solver::add_clause(std::vector<Lit> lits) {
    assert(decision_level() == 0);
    if (!ok_) return false;
    std::sort(lits.begin(), lits.end(),
              [](Lit a, Lit b) { return a.x < b.x; });
    // Drop duplicates and clause literals already false at the top level;
    // discard tautologies and clauses already satisfied.
    std::vector<Lit> out;
    Lit prev = kLitUndef;
    for (Lit p : lits) {
        if (p == prev) continue;
        if (prev != kLitUndef && p == ~prev) return true;  // tautology
        LBool v = value(p);
        if (v == LBool::True && level(var_of(p)) == 0) return true;
        if (v == LBool::False && level(var_of(p)) == 0) { prev = p; continue; }
        out.push_back(p);
        prev = p;
    }
    if (out.empty()) {
        ok_ = false;
        return false;
    }
    if (out.size() == 1) {
        unchecked_enqueue(out[0], nullptr);
        ok_ = propagate() == nullptr;
        return ok_;
    }
    Clause* c = new Clause{0.0f, false, std::move(out)};
    clauses_.push_back(c);
    attach_clause(c);
    return true;
}

void Solver::attach_clause(Clause* c) {
    assert(c->lits.size() >= 2);
    watches_[(~c->lits[0]).x].push_back(Watcher{c, c->lits[1]});
    watches_[(~c->lits[1]).x].push_back(Watcher{c, c->lits[0]});
}

void Solver::detach_clause(Clause* c) {
    for (Lit p : {c->lits[0], c->lits[1]}) {
        auto& ws = watches_[(~p).x];
        for (std::size_t i = 0; i < ws.size(); ++i) {
            if (ws[i].clause == c) {
                ws[i] = ws.back();
                ws.pop_back();
                break;
            }
        }
    }
}

bool Solver::locked(const Clause* c) const {
    return value(c->lits[0]) == LBool::True &&
           reason_[var_of(c->lits[0])] == c;
}

void Solver::unchecked_enqueue(Lit p, Clause* reason) {
    assert(value(p) == LBool::Undef);
    Var v = var_of(p);
    assigns_[v] = lbool_of(!sign_of(p));
    level_[v] = static_cast<std::uint32_t>(decision_level());
    reason_[v] = reason;
    trail_.push_back(p);
}

Solver::Clause* Solver::propagate() {
    Clause* confl = nullptr;
    while (qhead_ < trail_.size()) {
        Lit p = trail_[qhead_++];
        ++propagations_;
        auto& ws = watches_[p.x];
        std::size_t i = 0, j = 0;
        while (i < ws.size()) {
            Watcher w = ws[i];
            if (value(w.blocker) == LBool::True) {
                ws[j++] = ws[i++];
                continue;
            }
            Clause& c = *w.clause;
            // Normalize so the false watch sits at index 1.
            Lit not_p = ~p;
            if (c.lits[0] == not_p) std::swap(c.lits[0], c.lits[1]);
            assert(c.lits[1] == not_p);
            ++i;
            Lit first = c.lits[0];
            if (first != w.blocker && value(first) == LBool::True) {
                ws[j++] = Watcher{&c, first};
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < c.lits.size(); ++k) {
                if (value(c.lits[k]) != LBool::False) {
                    std::swap(c.lits[1], c.lits[k]);
                    watches_[(~c.lits[1]).x].push_back(Watcher{&c, first});
                    moved = true;
                    break;
                }
            }
            if (moved) continue;
            // Unit or conflicting.
            ws[j++] = Watcher{&c, first};
            if (value(first) == LBool::False) {
                confl = &c;
                qhead_ = trail_.size();
                while (i < ws.size()) ws[j++] = ws[i++];
            } else {
                unchecked_enqueue(first, &c);
            }
        }
        ws.resize(j);
        if (confl) break;
    }
    return confl;
}

void Solver::cancel_until(std::size_t lvl) {
    if (decision_level() <= lvl) return;
    for (std::size_t i = trail_.size(); i-- > trail_lim_[lvl];) {
        Var v = var_of(trail_[i]);
        polarity_[v] = assigns_[v] == LBool::True;
        assigns_[v] = LBool::Undef;
        reason_[v] = nullptr;
        if (heap_pos_[v] == kNoPos) heap_insert(v);
    }
    trail_.resize(trail_lim_[lvl]);
    trail_lim_.resize(lvl);
    qhead_ = trail_.size();
}

void Solver::var_bump_activity(Var v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
        for (double& a : activity_) a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] != kNoPos) heap_update(v);
}

void Solver::clause_bump_activity(Clause* c) {
    c->act += static_cast<float>(clause_inc_);
    if (c->act > 1e20f) {
        for (Clause* l : learnts_) l->act *= 1e-20f;
        clause_inc_ *= 1e-20;
    }
}

// First-UIP conflict analysis with basic self-subsumption minimization.
void Solver::analyze(Clause* confl, std::vector<Lit>& out_learnt,
                     std::size_t& out_btlevel) {
    out_learnt.clear();
    out_learnt.push_back(kLitUndef);  // slot for the asserting literal
    std::size_t index = trail_.size();
    Lit p = kLitUndef;
    int counter = 0;
    do {
        assert(confl != nullptr);
        clause_bump_activity(confl);
        std::size_t start = (p == kLitUndef) ? 0 : 1;
        for (std::size_t k = start; k < confl->lits.size(); ++k) {
            Lit q = confl->lits[k];
            Var v = var_of(q);
            if (!seen_[v] && level(v) > 0) {
                seen_[v] = true;
                seen_to_clear_.push_back(v);
                var_bump_activity(v);
                if (level(v) >= decision_level()) ++counter;
                else out_learnt.push_back(q);
            }
        }
        while (!seen_[var_of(trail_[index - 1])]) --index;
        --index;
        p = trail_[index];
        confl = reason_[var_of(p)];
        seen_[var_of(p)] = false;
        --counter;
    } while (counter > 0);
    out_learnt[0] = ~p;

    // Drop literals implied by the rest of the clause via their reason.
    std::size_t j = 1;
    for (std::size_t i = 1; i < out_learnt.size(); ++i) {
        Var x = var_of(out_learnt[i]);
        Clause* r = reason_[x];
        if (r == nullptr) {
            out_learnt[j++] = out_learnt[i];
            continue;
        }
        bool redundant = true;
        for (std::size_t k = 1; k < r->lits.size(); ++k) {
            Var y = var_of(r->lits[k]);
            if (!seen_[y] && level(y) > 0) {
                redundant = false;
                break;
            }
        }
        if (!redundant) out_learnt[j++] = out_learnt[i];
    }
    out_learnt.resize(j);

    if (out_learnt.size() == 1) {
        out_btlevel = 0;
    } else {
        std::size_t max_i = 1;
        for (std::size_t i = 2; i < out_learnt.size(); ++i)
            if (level(var_of(out_learnt[i])) > level(var_of(out_learnt[max_i])))
                max_i = i;
        std::swap(out_learnt[1], out_learnt[max_i]);
        out_btlevel = level(var_of(out_learnt[1]));
    }

    for (Var v : seen_to_clear_) seen_[v] = false;
    seen_to_clear_.clear();
}

// Computes the assumptions responsible for forcing false_assumption to be
// false: walks the trail backwards collecting decision literals (which are
// exactly the earlier assumptions) reachable through reasons.
void Solver::analyze_final(Lit false_assumption, std::vector<Lit>& out_core) {
    out_core.clear();
    out_core.push_back(false_assumption);
    if (decision_level() == 0) return;
    Var pv = var_of(false_assumption);
    seen_[pv] = true;
    for (std::size_t i = trail_.size(); i-- > trail_lim_[0];) {
        Var x = var_of(trail_[i]);
        if (!seen_[x]) continue;
        if (reason_[x] == nullptr) {
            // A decision inside an assumption-fed prefix is an assumption;
            // for contradictory assumptions this re-adds the twin literal.
            assert(level(x) > 0);
            out_core.push_back(trail_[i]);
        } else {
            const Clause& c = *reason_[x];
            for (std::size_t k = 1; k < c.lits.size(); ++k) {
                Var y = var_of(c.lits[k]);
                if (level(y) > 0) seen_[y] = true;
            }
        }
        seen_[x] = false;
    }
    seen_[pv] = false;
}

Lit Solver::pick_branch_lit() {
    while (!heap_empty()) {
        Var v = heap_pop();
        if (assigns_[v] == LBool::Undef)
            return mk_lit(v, !polarity_[v]);
    }
    return kLitUndef;
}

void Solver::reduce_db() {
    std::sort(learnts_.begin(), learnts_.end(),
              [](const Clause* a, const Clause* b) { return a->act < b->act; });
    std::size_t keep_from = learnts_.size() / 2;
    std::vector<Clause*> kept;
    kept.reserve(learnts_.size() - keep_from + 8);
    for (std::size_t i = 0; i < learnts_.size(); ++i) {
        Clause* c = learnts_[i];
        if (i < keep_from && c->lits.size() > 2 && !locked(c)) {
            detach_clause(c);
            delete c;
        } else {
            kept.push_back(c);
        }
    }
    learnts_ = std::move(kept);
}

SolveResult Solver::solve(const std::vector<Lit>& assumptions) {
    model_.clear();
    if (!ok_) return {SolveStatus::Unsat, {}};
    if (interrupt_ && interrupt_->load(std::memory_order_relaxed))
        return {SolveStatus::Interrupted, {}};
#ifndef NDEBUG
    for (Lit p : assumptions) assert(assumable_[var_of(p)]);
#endif
    cancel_until(0);

    std::uint64_t restart_round = 0;
    std::uint64_t conflicts_since_restart = 0;
    std::uint64_t restart_limit = 100 * luby(restart_round);
    const std::uint64_t budget_limit =
        propagation_budget_ ? propagations_ + propagation_budget_ : 0;
    std::vector<Lit> learnt;
    SolveResult result{SolveStatus::Sat, {}};

    for (;;) {
        Clause* confl = propagate();
        if (budget_limit && propagations_ > budget_limit) {
            cancel_until(0);
            return {SolveStatus::BudgetExceeded, {}};
        }
        if (confl != nullptr) {
            ++conflicts_;
            ++conflicts_since_restart;
            if (decision_level() == 0) {
                ok_ = false;
                cancel_until(0);
                return {SolveStatus::Unsat, {}};
            }
            std::size_t bt = 0;
            analyze(confl, learnt, bt);
            cancel_until(bt);
            if (learnt.size() == 1) {
                unchecked_enqueue(learnt[0], nullptr);
            } else {
                Clause* c = new Clause{0.0f, true, learnt};
                learnts_.push_back(c);
                attach_clause(c);
                clause_bump_activity(c);
                unchecked_enqueue(learnt[0], c);
            }
            var_decay_activity();
            clause_inc_ /= 0.999;
            if ((conflicts_ & 0xff) == 0 && interrupt_ &&
                interrupt_->load(std::memory_order_relaxed)) {
                cancel_until(0);
                return {SolveStatus::Interrupted, {}};
            }
            continue;
        }

        if (conflicts_since_restart >= restart_limit) {
            cancel_until(0);
            ++restart_round;
            conflicts_since_restart = 0;
            restart_limit = 100 * luby(restart_round);
            if (interrupt_ && interrupt_->load(std::memory_order_relaxed))
                return {SolveStatus::Interrupted, {}};
            continue;
        }
        if (learnts_.size() > max_learnts_) {
            reduce_db();
            max_learnts_ += max_learnts_ / 2;
        }

        // Feed pending assumptions as decisions, one level each.
        Lit next = kLitUndef;
        while (decision_level() < assumptions.size()) {
            Lit p = assumptions[decision_level()];
            if (value(p) == LBool::True) {
                new_decision_level();  // already satisfied, dummy level
            } else if (value(p) == LBool::False) {
                analyze_final(p, result.core);
                cancel_until(0);
                result.status = SolveStatus::Unsat;
                return result;
            } else {
                next = p;
                break;
            }
        }
        if (next == kLitUndef) {
            next = pick_branch_lit();
            if (next == kLitUndef) {
                model_.assign(assigns_.begin(), assigns_.end());
                cancel_until(0);
                return {SolveStatus::Sat, {}};
            }
        }
        new_decision_level();
        unchecked_enqueue(next, nullptr);
    }
}

bool Solver::model_value(Lit p) const {
    assert(!model_.empty());
    LBool a = model_[var_of(p)];
    if (a == LBool::Undef) return false;  // unconstrained var, any value works
    return (a == LBool::True) != sign_of(p);
}

void Solver::dump_dimacs(std::ostream& os) const {
    std::size_t n_clauses = clauses_.size();
    std::size_t n_units = 0;
    if (!trail_lim_.empty()) {
        n_units = trail_lim_[0];
    } else {
        n_units = trail_.size();
    }
    os << "p cnf " << num_vars() << ' '
       << n_clauses + n_units + (ok_ ? 0 : 1) << '\n';
    auto put = [&os](Lit p) {
        os << (sign_of(p) ? -static_cast<std::int64_t>(var_of(p)) - 1
                          : static_cast<std::int64_t>(var_of(p)) + 1);
    };
    for (std::size_t i = 0; i < n_units; ++i) {
        put(trail_[i]);
        os << " 0\n";
    }
    for (const Clause* c : clauses_) {
        for (std::size_t i = 0; i < c->lits.size(); ++i) {
            put(c->lits[i]);
            os << ' ';
        }
        os << "0\n";
    }
    if (!ok_) os << "0\n";
}

// ── activity heap ───────────────────────────────────────────────────────────

void Solver::heap_insert(Var v) {
    heap_pos_[v] = static_cast<std::uint32_t>(heap_.size());
    heap_.push_back(v);
    heap_sift_up(heap_.size() - 1);
}

void Solver::heap_update(Var v) { heap_sift_up(heap_pos_[v]); }

Var Solver::heap_pop() {
    Var top = heap_[0];
    heap_pos_[top] = kNoPos;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_pos_[heap_[0]] = 0;
        heap_sift_down(0);
    }
    return top;
}

void Solver::heap_sift_up(std::size_t i) {
    Var v = heap_[i];
    while (i > 0) {
        std::size_t parent = (i - 1) / 2;
        if (activity_[heap_[parent]] >= activity_[v]) break;
        heap_[i] = heap_[parent];
        heap_pos_[heap_[i]] = static_cast<std::uint32_t>(i);
        i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<std::uint32_t>(i);
}

void Solver::heap_sift_down(std::size_t i) {
    Var v = heap_[i];
    for (;;) {
        std::size_t child = 2 * i + 1;
        if (child >= heap_.size()) break;
        if (child + 1 < heap_.size() &&
            activity_[heap_[child + 1]] > activity_[heap_[child]])
            ++child;
        if (activity_[heap_[child]] <= activity_[v]) break;
        heap_[i] = heap_[child];
        heap_pos_[heap_[i]] = static_cast<std::uint32_t>(i);
        i = child;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<std::uint32_t>(i);
}

} // namespace ltlfmuc::sat
