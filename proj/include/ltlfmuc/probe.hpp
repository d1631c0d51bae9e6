// Depth-k bounded-satisfiability probe over a conjunctive specification.
//
// The probe is a propositional encoding with one assumable selector per
// conjunct such that for every selector subset S:
//
//   query(S) is Sat  iff  the conjunction of the selected conjuncts has a
//                         model of length at most k.
//
// Trace length is part of the model: an exactly-one marker last(t) picks
// the final position, so a single probe covers every length 1..k and the
// biconditional above holds literally (a fixed-length encoding would
// misjudge end-sensitive formulas such as !X true).

#ifndef LTLFMUC_PROBE_HPP
#define LTLFMUC_PROBE_HPP

#include "ltlfmuc/formula.hpp"
#include "ltlfmuc/sat.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace ltlfmuc {

/// 1-based conjunct indices, kept sorted ascending.
using SelectorSet = std::vector<std::size_t>;

class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProbeLimits {
    std::uint64_t var_budget = 10'000'000;     // fresh variables per probe
    std::uint64_t propagation_budget = 0;      // 0 = unlimited, per query
};

struct ProbeResult {
    enum class Kind : std::uint8_t { Sat, Unsat, Interrupted, BudgetExceeded };
    Kind kind;
    std::optional<Trace> witness;  // Sat: model of the selected conjuncts
    std::size_t length = 0;        // Sat: witness length, 1 <= length <= k
    SelectorSet core;              // Unsat: subset of S, not minimal

    bool sat() const { return kind == Kind::Sat; }
    bool unsat() const { return kind == Kind::Unsat; }
};

class Probe {
public:
    /// Builds the encoding for all conjuncts of spec at depth k.
    /// Throws std::invalid_argument for k = 0 and ResourceLimitError when
    /// the estimated variable count exceeds limits.var_budget.
    Probe(const ConjunctiveSpec& spec, unsigned k, ProbeLimits limits = {});

    unsigned depth() const { return k_; }
    std::size_t conjunct_count() const { return n_; }
    const ConjunctiveSpec& spec() const { return *spec_; }

    ProbeResult query(const SelectorSet& s);

    void set_interrupt_flag(const std::atomic<bool>* flag) {
        solver_.set_interrupt_flag(flag);
    }
    void dump_dimacs(std::ostream& os) const { solver_.dump_dimacs(os); }

private:
    sat::Lit holds_lit(std::size_t t, FormulaId f) const;
    sat::Lit fresh_lit();
    void define_node(std::size_t t, FormulaId f);
    Trace decode_witness(std::size_t length) const;

    const ConjunctiveSpec* spec_;
    unsigned k_;
    std::size_t n_;
    sat::Solver solver_;

    std::vector<FormulaId> desugared_;       // per conjunct
    std::vector<FormulaId> topo_;            // children-first over all conjuncts
    std::vector<AtomId> alphabet_;
    std::unordered_map<AtomId, std::size_t> atom_index_;
    std::unordered_map<std::uint64_t, sat::Lit> holds_;  // (t, formula) -> lit
    std::vector<sat::Var> trace_var_;        // t * |alphabet| + atom index
    std::vector<sat::Var> last_var_;         // t
    std::vector<sat::Var> selector_;         // conjunct index - 1
    sat::Lit true_lit_;
};

} // namespace ltlfmuc

#endif
