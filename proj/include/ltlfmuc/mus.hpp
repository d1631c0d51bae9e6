// Lazy MUS enumeration over a probe's selector set.
//
// MARCO-style lattice exploration: a meta SAT instance over one variable
// per selector describes the unexplored region of the subset lattice.  A
// maximal unexplored seed either queries Sat (block its whole down-set) or
// Unsat (shrink the returned core to a MUS, emit it, block its up-set).
// Each emitted set is minimal unsatisfiable and no set is emitted twice;
// draining the stream yields the complete MUS collection.

#ifndef LTLFMUC_MUS_HPP
#define LTLFMUC_MUS_HPP

#include "ltlfmuc/probe.hpp"
#include "ltlfmuc/sat.hpp"

#include <cstdint>
#include <vector>

namespace ltlfmuc {

class MusEnumerator {
public:
    struct Item {
        enum class Kind : std::uint8_t { Mus, Done, Error };
        Kind kind;
        SelectorSet mus;               // for Kind::Mus
        ProbeResult::Kind error;       // for Kind::Error
    };

    /// The enumerator takes exclusive use of the probe while alive.
    explicit MusEnumerator(Probe& probe);

    /// Pulls the next MUS.  Done once the lattice is exhausted; Error
    /// aborts the stream (and repeats on further calls).
    Item next();

    /// Deletion-based minimization: returns M subseteq u with query(M)
    /// Unsat and every proper subset one element smaller Sat.  Elements
    /// are dropped in descending order and unsat cores short-cut the scan.
    /// Precondition (checked): query(u) is Unsat.
    SelectorSet shrink(const SelectorSet& u);

    /// Excludes s and every superset from future seeds.  Sound whenever s
    /// is unsatisfiable under the probe: supersets of an unsatisfiable set
    /// are never minimal, so no MUS is lost.
    void block_up(const SelectorSet& s);

    /// Test hook: true while the exact subset s is still a model of the
    /// exploration map.
    bool is_unexplored(const SelectorSet& s);

    /// Seed iterations taken so far (each permanently blocks lattice area).
    std::uint64_t steps() const { return steps_; }

    /// Interrupts map solving too; the probe carries its own flag.
    void set_interrupt_flag(const std::atomic<bool>* flag) {
        map_.set_interrupt_flag(flag);
    }

private:
    struct ShrinkOutcome {
        bool ok;
        SelectorSet mus;
        ProbeResult::Kind error;
    };
    ShrinkOutcome shrink_impl(SelectorSet m);
    SelectorSet extend_maximal(SelectorSet seed) const;

    Probe* probe_;
    std::size_t n_;
    sat::Solver map_;
    std::vector<sat::Var> meta_;           // selector i -> meta_[i-1]
    std::vector<SelectorSet> found_muses_;  // for syntactic maximal extension
    bool dead_ = false;
    Item last_error_{Item::Kind::Error, {}, ProbeResult::Kind::Interrupted};
    std::uint64_t steps_ = 0;
};

} // namespace ltlfmuc

#endif
