#include "ltlfmuc/mus.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace ltlfmuc {

MusEnumerator::MusEnumerator(Probe& probe)
    : probe_(&probe), n_(probe.conjunct_count()) {
    map_.set_default_polarity(true);  // seeds start from the top of the lattice
    meta_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        meta_[i] = map_.new_var();
        map_.register_assumable(sat::mk_lit(meta_[i]));
        map_.register_assumable(sat::mk_lit(meta_[i], true));
    }
}

// Grows a map model into a maximal one.  The map's clauses are either
// all-positive (down-set blocks), which adding elements cannot falsify, or
// all-negative over an emitted MUS, so the only obstruction to adding i is
// completing some known MUS.
SelectorSet MusEnumerator::extend_maximal(SelectorSet seed) const {
    std::vector<bool> in(n_ + 1, false);
    for (std::size_t i : seed) in[i] = true;
    for (std::size_t i = 1; i <= n_; ++i) {
        if (in[i]) continue;
        bool completes_mus = false;
        for (const SelectorSet& m : found_muses_) {
            bool all = false;
            if (std::find(m.begin(), m.end(), i) != m.end()) {
                all = true;
                for (std::size_t e : m)
                    if (e != i && !in[e]) {
                        all = false;
                        break;
                    }
            }
            if (all) {
                completes_mus = true;
                break;
            }
        }
        if (!completes_mus) in[i] = true;
    }
    SelectorSet out;
    for (std::size_t i = 1; i <= n_; ++i)
        if (in[i]) out.push_back(i);
    return out;
}

MusEnumerator::Item MusEnumerator::next() {
    if (dead_) return last_error_;
    for (;;) {
        sat::SolveResult seed_model = map_.solve({});
        if (seed_model.status == sat::SolveStatus::Unsat)
            return {Item::Kind::Done, {}, {}};
        if (seed_model.status != sat::SolveStatus::Sat) {
            dead_ = true;
            last_error_ = {Item::Kind::Error, {},
                           seed_model.status == sat::SolveStatus::Interrupted
                               ? ProbeResult::Kind::Interrupted
                               : ProbeResult::Kind::BudgetExceeded};
            return last_error_;
        }
        ++steps_;
        SelectorSet seed;
        for (std::size_t i = 0; i < n_; ++i)
            if (map_.model_value(sat::mk_lit(meta_[i]))) seed.push_back(i + 1);
        seed = extend_maximal(std::move(seed));

        ProbeResult r = probe_->query(seed);
        if (r.sat()) {
            // Everything under the seed is satisfiable too; require at
            // least one element outside it from now on.
            std::vector<sat::Lit> clause;
            std::vector<bool> in(n_ + 1, false);
            for (std::size_t i : seed) in[i] = true;
            for (std::size_t i = 1; i <= n_; ++i)
                if (!in[i]) clause.push_back(sat::mk_lit(meta_[i - 1]));
            map_.add_clause(std::move(clause));
            continue;
        }
        if (!r.unsat()) {
            dead_ = true;
            last_error_ = {Item::Kind::Error, {}, r.kind};
            return last_error_;
        }
        ShrinkOutcome sh = shrink_impl(std::move(r.core));
        if (!sh.ok) {
            dead_ = true;
            last_error_ = {Item::Kind::Error, {}, sh.error};
            return last_error_;
        }
        block_up(sh.mus);
        return {Item::Kind::Mus, std::move(sh.mus), {}};
    }
}

MusEnumerator::ShrinkOutcome MusEnumerator::shrink_impl(SelectorSet m) {
    std::sort(m.begin(), m.end());
    std::size_t idx = m.size();
    while (idx > 0) {
        --idx;
        std::size_t s = m[idx];
        SelectorSet candidate;
        candidate.reserve(m.size() - 1);
        for (std::size_t e : m)
            if (e != s) candidate.push_back(e);
        ProbeResult r = probe_->query(candidate);
        if (r.sat()) continue;  // s is critical, keep it
        if (!r.unsat()) return {false, {}, r.kind};
        // s is disposable; the refined core may drop more elements.
        // Elements above s have already proven critical and criticality
        // survives shrinking, so rescanning them is unnecessary.
        m = std::move(r.core);
        std::sort(m.begin(), m.end());
        idx = static_cast<std::size_t>(
            std::lower_bound(m.begin(), m.end(), s) - m.begin());
    }
    return {true, std::move(m), {}};
}

void MusEnumerator::block_up(const SelectorSet& s) {
    SelectorSet m = s;
    std::sort(m.begin(), m.end());
    std::vector<sat::Lit> clause;
    clause.reserve(m.size());
    for (std::size_t i : m) {
        if (i < 1 || i > n_) throw std::out_of_range("selector index out of range");
        clause.push_back(sat::mk_lit(meta_[i - 1], true));
    }
    found_muses_.push_back(std::move(m));
    map_.add_clause(std::move(clause));
}

SelectorSet MusEnumerator::shrink(const SelectorSet& u) {
#ifndef NDEBUG
    {
        ProbeResult pre = probe_->query(u);
        assert(pre.unsat() && "shrink requires an unsatisfiable subset");
    }
#endif
    ShrinkOutcome sh = shrink_impl(u);
    if (!sh.ok)
        throw ResourceLimitError("oracle limit reached while shrinking");
    return sh.mus;
}

bool MusEnumerator::is_unexplored(const SelectorSet& s) {
    std::vector<bool> in(n_ + 1, false);
    for (std::size_t i : s) in[i] = true;
    std::vector<sat::Lit> assumptions;
    for (std::size_t i = 1; i <= n_; ++i)
        assumptions.push_back(sat::mk_lit(meta_[i - 1], !in[i]));
    return map_.solve(assumptions).status == sat::SolveStatus::Sat;
}

} // namespace ltlfmuc
