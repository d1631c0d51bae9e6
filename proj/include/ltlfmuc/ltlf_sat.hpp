// Complete finite-trace satisfiability with minimal witness length.
//
// The decision procedure runs a breadth-first search over obligation sets:
// a state is the set of negation-normal-form formulas that must still hold
// of the remaining suffix.  Expanding a state against a propositional
// assignment yields the alternative residual obligations one step later
// (the nondeterminism of Until and Or), each a subset of the closure of
// the input, so at most 2^n states exist for n closure formulas.  BFS
// depth equals trace length, hence the returned length is minimal.

#ifndef LTLFMUC_LTLF_SAT_HPP
#define LTLFMUC_LTLF_SAT_HPP

#include "ltlfmuc/formula.hpp"

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ltlfmuc {

struct LtlfLimits {
    std::uint64_t state_budget = std::uint64_t{1} << 22;  // distinct states
};

struct SatOutcome {
    enum class Kind : std::uint8_t { Sat, Unsat, BudgetExceeded, Interrupted };
    Kind kind;
    std::size_t length = 0;          // Sat: minimum model length
    std::optional<Trace> witness;    // Sat: a model of that length
    std::uint64_t states_explored = 0;
    std::uint64_t state_cap = 0;     // 2^n for n closure formulas (saturated)

    bool sat() const { return kind == Kind::Sat; }
    bool unsat() const { return kind == Kind::Unsat; }
};

/// Decides satisfiability of the conjunction of psi over finite traces.
/// Unsat means no finite trace at all; Sat carries the minimum length and
/// one witness.  The state budget failure is reported as its own kind,
/// never as Unsat.
SatOutcome check_satisfiability(FormulaArena& arena,
                                std::span<const FormulaId> psi,
                                const LtlfLimits& limits = {},
                                const std::atomic<bool>* interrupt = nullptr);

// ── Formula progression ─────────────────────────────────────────────────────
// The externally visible stepping interface.  An ObligationState is the
// determinized residual: a set of alternative obligation sets, any one of
// which discharges the original formula.  Feeding a trace through progress
// position by position agrees with evaluate (the final position is fed
// with is_last = true).

class ObligationState;
struct ProgressResult;
ProgressResult progress(FormulaArena& arena, const ObligationState& state,
                        std::span<const AtomId> sigma, bool is_last);

class ObligationState {
public:
    /// Residual obligation for the conjunction of psi before any input.
    static ObligationState initial(FormulaArena& arena,
                                   std::span<const FormulaId> psi);

    /// No alternative left: every continuation is rejected.
    bool dead() const { return alternatives_.empty(); }

    /// Alternatives as sorted formula-id sets; an empty set means the
    /// alternative is already discharged.
    const std::vector<std::vector<FormulaId>>& alternatives() const {
        return alternatives_;
    }

    bool operator==(const ObligationState& o) const {
        return alternatives_ == o.alternatives_;
    }

private:
    friend struct ProgressResult;
    friend ProgressResult progress(FormulaArena&, const ObligationState&,
                                   std::span<const AtomId>, bool);
    std::vector<std::vector<FormulaId>> alternatives_;
};

enum class ProgressKind : std::uint8_t { Accept, Reject, Continue };

struct ProgressResult {
    ProgressKind kind;
    ObligationState next;  // meaningful only for Continue
};

/// One progression step: sigma is the set of atoms true at the current
/// position.  With is_last the position is final and the result is Accept
/// or Reject; otherwise Continue carries the residual state, or Reject if
/// no alternative survives sigma.
ProgressResult progress(FormulaArena& arena, const ObligationState& state,
                        std::span<const AtomId> sigma, bool is_last);

} // namespace ltlfmuc

#endif
