// Incremental propositional oracle: conflict-driven clause learning with
// two-literal watching, assumption literals and unsatisfiable-core
// extraction.  Cores are whatever the final conflict analysis reaches and
// are not minimal; minimization is the caller's business.

#ifndef LTLFMUC_SAT_HPP
#define LTLFMUC_SAT_HPP

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ltlfmuc::sat {

using Var = std::uint32_t;

// Literal packed as 2*var + sign, sign 1 meaning negated.
struct Lit {
    std::uint32_t x = 0xffffffffu;
    bool operator==(const Lit& o) const noexcept { return x == o.x; }
    bool operator!=(const Lit& o) const noexcept { return x != o.x; }
};

inline constexpr Lit kLitUndef{};

inline Lit mk_lit(Var v, bool neg = false) { return Lit{(v << 1) | (neg ? 1u : 0u)}; }
inline Lit operator~(Lit p) { return Lit{p.x ^ 1u}; }
inline Var var_of(Lit p) { return p.x >> 1; }
inline bool sign_of(Lit p) { return p.x & 1u; }

enum class SolveStatus : std::uint8_t {
    Sat,
    Unsat,
    Interrupted,     // external interrupt flag observed
    BudgetExceeded,  // propagation budget exhausted; NOT an UNSAT verdict
};

struct SolveResult {
    SolveStatus status;
    std::vector<Lit> core;  // on Unsat: subset of the assumptions
};

class Solver {
public:
    Solver();
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    Var new_var();
    std::size_t num_vars() const { return assigns_.size(); }

    /// Marks a literal as usable in solve() assumptions.
    void register_assumable(Lit p);

    /// Adds a clause; an empty vector is the empty clause and makes the
    /// instance permanently unsatisfiable.  Returns false once the clause
    /// set is known contradictory at the top level.
    bool add_clause(std::vector<Lit> lits);

    SolveResult solve(const std::vector<Lit>& assumptions);

    /// Value of p in the most recent Sat model.
    bool model_value(Lit p) const;

    /// 0 disables the budget.  The budget counts propagations across the
    /// whole solve call and is checked during search.
    void set_propagation_budget(std::uint64_t budget) { propagation_budget_ = budget; }
    void set_interrupt_flag(const std::atomic<bool>* flag) { interrupt_ = flag; }

    /// Default branching polarity for every variable, existing and fresh.
    /// Resets saved phases; phase saving takes over again afterwards.
    void set_default_polarity(bool value);

    std::uint64_t propagations() const { return propagations_; }
    std::uint64_t conflicts() const { return conflicts_; }

    /// Standard CNF interchange dump of the stored instance: problem line,
    /// then one zero-terminated clause per line.  Top-level units appear
    /// as unit clauses.
    void dump_dimacs(std::ostream& os) const;

private:
    struct Clause;
    struct Watcher {
        Clause* clause;
        Lit blocker;
    };

    enum class LBool : std::uint8_t { True, False, Undef };
    static LBool lbool_of(bool b) { return b ? LBool::True : LBool::False; }

    LBool value(Var v) const { return assigns_[v]; }
    LBool value(Lit p) const {
        LBool a = assigns_[var_of(p)];
        if (a == LBool::Undef) return LBool::Undef;
        return (a == LBool::True) != sign_of(p) ? LBool::True : LBool::False;
    }

    std::size_t decision_level() const { return trail_lim_.size(); }
    void new_decision_level() { trail_lim_.push_back(trail_.size()); }
    std::size_t level(Var v) const { return level_[v]; }

    void unchecked_enqueue(Lit p, Clause* reason);
    Clause* propagate();
    void cancel_until(std::size_t lvl);
    void analyze(Clause* confl, std::vector<Lit>& out_learnt, std::size_t& out_btlevel);
    void analyze_final(Lit false_assumption, std::vector<Lit>& out_core);
    Lit pick_branch_lit();
    void attach_clause(Clause* c);
    void detach_clause(Clause* c);
    bool locked(const Clause* c) const;
    void reduce_db();
    void var_bump_activity(Var v);
    void var_decay_activity() { var_inc_ /= 0.95; }
    void clause_bump_activity(Clause* c);

    // activity-ordered max-heap over variables
    void heap_insert(Var v);
    void heap_update(Var v);
    Var heap_pop();
    bool heap_empty() const { return heap_.empty(); }
    void heap_sift_up(std::size_t i);
    void heap_sift_down(std::size_t i);

    std::vector<Clause*> clauses_;
    std::vector<Clause*> learnts_;
    std::vector<std::vector<Watcher>> watches_;  // indexed by Lit.x

    std::vector<LBool> assigns_;
    std::vector<bool> polarity_;    // saved phase
    std::vector<bool> assumable_;
    std::vector<double> activity_;
    std::vector<std::uint32_t> level_;
    std::vector<Clause*> reason_;
    std::vector<Lit> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_ = 0;

    std::vector<std::uint32_t> heap_;      // heap of vars
    std::vector<std::uint32_t> heap_pos_;  // var -> index in heap_, or npos

    std::vector<bool> seen_;
    std::vector<Var> seen_to_clear_;

    std::vector<LBool> model_;

    bool ok_ = true;
    bool default_polarity_ = false;
    double var_inc_ = 1.0;
    double clause_inc_ = 1.0;
    std::uint64_t propagations_ = 0;
    std::uint64_t conflicts_ = 0;
    std::uint64_t propagation_budget_ = 0;
    const std::atomic<bool>* interrupt_ = nullptr;
    std::size_t max_learnts_ = 4000;
};

} // namespace ltlfmuc::sat

#endif
