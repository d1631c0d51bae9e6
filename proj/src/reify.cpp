#include "ltlfmuc/reify.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <unordered_map>

namespace ltlfmuc {
namespace {

struct Numberer {
    const FormulaArena& arena;
    std::unordered_map<FormulaId, ReifyId> id_of;
    std::vector<SubformulaRow> rows;
    std::vector<ReifyId> visit_order;
    ReifyId next = 0;

    ReifyId assign(FormulaId f) {
        auto it = id_of.find(f);
        if (it != id_of.end()) return it->second;
        ReifyId id = next++;
        id_of.emplace(f, id);
        return id;
    }

    // Children are numbered before descending, so siblings get consecutive
    // ids even when their subtrees differ in size.
    void visit(FormulaId f) {
        ReifyId id = id_of.at(f);
        if (id < rows.size() && rows[id].formula == f) return;  // already visited
        const FormulaNode& n = arena.node(f);
        SubformulaRow row;
        row.id = id;
        row.kind = n.kind;
        row.formula = f;
        row.atom = n.atom;
        for (FormulaId c : {n.child[0], n.child[1]}) {
            if (c == kInvalidFormula) continue;
            row.children.push_back(assign(c));
        }
        if (rows.size() <= id) rows.resize(id + 1);
        rows[id] = std::move(row);
        visit_order.push_back(id);
        for (FormulaId c : {n.child[0], n.child[1]}) {
            if (c != kInvalidFormula) visit(c);
        }
    }
};

} // namespace

ReifyId Reification::id_of(FormulaId f) const {
    auto it = ids_.find(f);
    if (it == ids_.end())
        throw std::out_of_range("formula not part of this reification");
    return it->second;
}

Reification reify_formula(const FormulaArena& arena, FormulaId f) {
    Numberer num{arena};
    num.assign(f);  // id 0
    num.visit(f);
    Reification r;
    r.rows_ = std::move(num.rows);
    r.visit_order_ = std::move(num.visit_order);
    r.ids_ = std::move(num.id_of);
    return r;
}

Reification reify_spec(const FormulaArena& arena,
                       std::span<const FormulaId> conjuncts) {
    if (conjuncts.empty())
        throw std::invalid_argument("reify_spec needs at least one conjunct");
    Numberer num{arena};
    num.next = 1;  // 0 is reserved for the virtual root
    SubformulaRow root;
    root.id = 0;
    root.kind = NodeKind::And;
    root.formula = kInvalidFormula;
    for (FormulaId c : conjuncts) root.children.push_back(num.assign(c));
    num.rows.push_back(std::move(root));
    num.visit_order.push_back(0);
    for (FormulaId c : conjuncts) num.visit(c);

    Reification r;
    r.rows_ = std::move(num.rows);
    r.visit_order_ = std::move(num.visit_order);
    r.ids_ = std::move(num.id_of);
    r.virtual_root_ = true;
    return r;
}

std::vector<SubformulaRow> subformula_table(const FormulaArena& arena, FormulaId f) {
    return reify_formula(arena, f).rows();
}

namespace {

void append_facts(const FormulaArena& arena, const SubformulaRow& row,
                  std::string& out) {
    const std::string x = std::to_string(row.id);
    switch (row.kind) {
        case NodeKind::And:
        case NodeKind::Or: {
            const char* pred = row.kind == NodeKind::And ? "conjunction" : "disjunction";
            std::vector<ReifyId> seen;
            for (ReifyId c : row.children) {
                if (std::find(seen.begin(), seen.end(), c) != seen.end())
                    continue;  // duplicate child, facts form a set
                seen.push_back(c);
                out += pred;
                out += "(" + x + ", " + std::to_string(c) + ").\n";
            }
            break;
        }
        case NodeKind::Not:
            out += "negate(" + x + ", " + std::to_string(row.children[0]) + ").\n";
            break;
        case NodeKind::Next:
            out += "next(" + x + ", " + std::to_string(row.children[0]) + ").\n";
            break;
        case NodeKind::Until:
            out += "until(" + x + ", " + std::to_string(row.children[0]) + ", " +
                   std::to_string(row.children[1]) + ").\n";
            break;
        case NodeKind::Release:
            out += "release(" + x + ", " + std::to_string(row.children[0]) + ", " +
                   std::to_string(row.children[1]) + ").\n";
            break;
        case NodeKind::Atom:
            out += "atom(" + x + ", " + arena.atom_name(row.atom) + ").\n";
            break;
        case NodeKind::True:
            out += "true(" + x + ").\n";
            break;
        default:
            assert(!"export requires desugared conjuncts");
    }
}

// The recursive rule set defining holds/2 over the reified syntax.  Until,
// negation, conjunction and next follow the published bounded encoding;
// disjunction, release and true have no published rules, so the standard
// finite-trace readings are supplied (release discharges on a NOW state
// where both sides hold, at the end of the trace, or by stepping forward).
constexpr const char* kSemanticsRules =
    "holds(T,X) :- trace(T,A), atom(X,A).\n"
    "holds(T,X) :- holds(T+1,F),\n"
    "  next(X,F), time(T+1).\n"
    "holds(T,X) :- until(X,LHS,RHS),\n"
    "  holds(T,RHS).\n"
    "holds(T,X) :- holds(T,LHS), holds(T+1,X),\n"
    "  until(X,LHS,RHS).\n"
    "holds(T,X) :- conjunction(X,_), time(T),\n"
    "  holds(T,F): conjunction(X,F).\n"
    "holds(T,X) :- negate(X,F),\n"
    "  not holds(T,F), time(T).\n"
    "holds(T,X) :- disjunction(X,F), holds(T,F).\n"
    "holds(T,X) :- release(X,LHS,RHS),\n"
    "  holds(T,RHS), holds(T,LHS).\n"
    "holds(T,X) :- release(X,LHS,RHS),\n"
    "  holds(T,RHS), not time(T+1).\n"
    "holds(T,X) :- release(X,LHS,RHS),\n"
    "  holds(T,RHS), holds(T+1,X).\n"
    "holds(T,X) :- true(X), time(T).\n";

} // namespace

std::string export_asp_facts(const ConjunctiveSpec& spec, unsigned k) {
    FormulaArena& arena = spec.arena();
    std::vector<FormulaId> conjuncts;
    conjuncts.reserve(spec.size());
    for (FormulaId c : spec.conjuncts()) conjuncts.push_back(arena.desugar(c));
    Reification r = reify_spec(arena, conjuncts);

    std::string out;
    out += "% formula facts\n";
    for (ReifyId id : r.visit_order()) {
        if (id == 0) continue;  // the root conjunction becomes the annotation
        append_facts(arena, r.rows()[id], out);
    }
    out += "root(0).\n";

    out += "\n% probe annotation\n";
    std::vector<ReifyId> seen;
    for (ReifyId c : r.rows()[0].children) {
        if (std::find(seen.begin(), seen.end(), c) != seen.end()) continue;
        seen.push_back(c);
        const std::string i = std::to_string(c);
        out += "conjunction(0," + i + ") :- phi(" + i + "). {phi(" + i + ")}.\n";
    }

    out += "\n% finite-trace semantics\n";
    out += kSemanticsRules;

    out += "\n% bounded satisfiability, traces of length k\n";
    out += "#const k=" + std::to_string(k) + ".\n";
    out += "time(0..k-1).\n";
    out += "{ trace(T,A): atom(_,A) } :- time(T).\n";
    out += ":- root(X), not holds(X,0).\n";
    return out;
}

} // namespace ltlfmuc
