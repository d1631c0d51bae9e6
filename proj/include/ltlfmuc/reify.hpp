// Dense subformula identifiers and the ASP-facts export.
//
// Reification walks the formula DAG in preorder and numbers nodes as it
// first meets them: when a node is processed its children receive the next
// free ids left to right, so the root is always 0 and shared subformulas
// keep one id.  The numbering is deterministic, which makes the exported
// fact text reproducible.

#ifndef LTLFMUC_REIFY_HPP
#define LTLFMUC_REIFY_HPP

#include "ltlfmuc/formula.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ltlfmuc {

using ReifyId = std::uint32_t;

struct SubformulaRow {
    ReifyId id{};
    NodeKind kind{};
    FormulaId formula{kInvalidFormula};  // kInvalidFormula for a virtual root
    std::vector<ReifyId> children;       // dense ids, left to right
    AtomId atom{0};                      // valid when kind == Atom
};

class Reification {
public:
    /// Rows indexed by dense id; row 0 is the root.
    const std::vector<SubformulaRow>& rows() const { return rows_; }

    /// Dense ids in first-visit preorder, the order facts are printed in.
    const std::vector<ReifyId>& visit_order() const { return visit_order_; }

    ReifyId id_of(FormulaId f) const;
    bool has_virtual_root() const { return virtual_root_; }

private:
    friend Reification reify_spec(const FormulaArena&, std::span<const FormulaId>);
    friend Reification reify_formula(const FormulaArena&, FormulaId);

    std::vector<SubformulaRow> rows_;
    std::vector<ReifyId> visit_order_;
    std::unordered_map<FormulaId, ReifyId> ids_;
    bool virtual_root_ = false;
};

/// Numbers the DAG of f with f itself as id 0.
Reification reify_formula(const FormulaArena& arena, FormulaId f);

/// Numbers the DAG spanned by the conjuncts under a virtual conjunction
/// root with id 0.  Duplicate conjuncts share one id.
Reification reify_spec(const FormulaArena& arena,
                       std::span<const FormulaId> conjuncts);

/// Convenience: rows of reify_formula(f) in id order.
std::vector<SubformulaRow> subformula_table(const FormulaArena& arena, FormulaId f);

/// Renders a conjunctive specification as a ground ASP program: reified
/// facts, the per-conjunct choice annotation over phi/1, finite-trace
/// semantics rules, and the depth-k bounded-satisfiability preamble.
/// Conjuncts are desugared first; a constant-true subformula is reified
/// through the extra predicate true/1, which the fact schema otherwise
/// has no name for.
std::string export_asp_facts(const ConjunctiveSpec& spec, unsigned k);

} // namespace ltlfmuc

#endif
