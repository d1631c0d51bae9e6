// Formula representation for linear temporal logic over finite traces.
//
// Formulas live in a FormulaArena as an interned DAG: two structurally
// identical formulas always share one FormulaId, so equality is an integer
// compare.  Arena ids are internal handles; the externally visible dense
// reification ids are assigned separately (see reify.hpp).

#ifndef LTLFMUC_FORMULA_HPP
#define LTLFMUC_FORMULA_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ltlfmuc {

using FormulaId = std::uint32_t;
inline constexpr FormulaId kInvalidFormula = static_cast<FormulaId>(-1);

using AtomId = std::uint32_t;

enum class NodeKind : std::uint8_t {
    Atom,
    True,
    False,      // sugar: !true
    Not,
    And,
    Or,
    Next,       // strong next: requires a successor state
    WeakNext,   // sugar: !X!f
    Until,
    Release,
    Eventually, // sugar: true U f
    Globally,   // sugar: !(true U !f)
    Implies,    // sugar: !f | g
};

const char* node_kind_name(NodeKind k) noexcept;

/// True for the kinds that survive desugaring.
bool is_core_kind(NodeKind k) noexcept;

struct FormulaNode {
    NodeKind  kind{};
    AtomId    atom{0};                               // valid for Atom only
    FormulaId child[2]{kInvalidFormula, kInvalidFormula};
};

// ── FormulaArena ────────────────────────────────────────────────────────────
// Owns all nodes and atom names.  make_*() methods intern structurally and
// never simplify: callers get back exactly the shape they asked for.

class FormulaArena {
public:
    FormulaArena();

    FormulaId make_atom(std::string_view name);
    FormulaId make_true();
    FormulaId make_false();
    FormulaId make_not(FormulaId f);
    FormulaId make_and(FormulaId lhs, FormulaId rhs);
    FormulaId make_or(FormulaId lhs, FormulaId rhs);
    FormulaId make_next(FormulaId f);
    FormulaId make_weak_next(FormulaId f);
    FormulaId make_until(FormulaId lhs, FormulaId rhs);
    FormulaId make_release(FormulaId lhs, FormulaId rhs);
    FormulaId make_eventually(FormulaId f);
    FormulaId make_globally(FormulaId f);
    FormulaId make_implies(FormulaId lhs, FormulaId rhs);

    const FormulaNode& node(FormulaId id) const { return nodes_[id]; }
    NodeKind kind(FormulaId id) const { return nodes_[id].kind; }
    std::size_t size() const { return nodes_.size(); }

    const std::string& atom_name(AtomId a) const { return atom_names_[a]; }
    std::size_t atom_count() const { return atom_names_.size(); }
    /// Atom id if the name is already interned, kInvalidFormula otherwise.
    AtomId find_atom(std::string_view name) const;

    /// Rewrites sugar kinds into the core set {Atom, True, Not, And, Or,
    /// Next, Until, Release}.  Memoized; semantics preserving.
    FormulaId desugar(FormulaId f);

    /// Negation normal form over core kinds plus WeakNext, with negation
    /// only on atoms and True/False as explicit constants.  Input must be
    /// desugared.
    FormulaId nnf(FormulaId f);

    /// Atoms occurring in f, in first-occurrence DFS order.
    void collect_atoms(FormulaId f, std::vector<AtomId>& out) const;

private:
    FormulaId intern(NodeKind kind, AtomId atom, FormulaId c0, FormulaId c1);
    FormulaId nnf_pos(FormulaId f);
    FormulaId nnf_neg(FormulaId f);

    struct NodeKey {
        NodeKind kind;
        AtomId atom;
        FormulaId c0, c1;
        bool operator==(const NodeKey& o) const noexcept {
            return kind == o.kind && atom == o.atom && c0 == o.c0 && c1 == o.c1;
        }
    };
    struct NodeKeyHash {
        std::size_t operator()(const NodeKey& k) const noexcept;
    };

    std::vector<FormulaNode> nodes_;
    std::unordered_map<NodeKey, FormulaId, NodeKeyHash> intern_;
    std::vector<std::string> atom_names_;
    std::unordered_map<std::string, AtomId> atom_ids_;
    std::unordered_map<FormulaId, FormulaId> desugar_memo_;
    std::unordered_map<FormulaId, FormulaId> nnf_pos_memo_;
    std::unordered_map<FormulaId, FormulaId> nnf_neg_memo_;
};

// ── Parsing and printing ────────────────────────────────────────────────────

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line, std::size_t column)
        : std::runtime_error(std::move(message)), line_(line), column_(column) {}
    std::size_t line() const { return line_; }      // 1-based
    std::size_t column() const { return column_; }  // 1-based
private:
    std::size_t line_, column_;
};

/// Parses one formula.  Grammar (loosest to tightest):
///   implies: right-assoc '->' | or: '|' | and: '&'
///   until/release: right-assoc 'U' 'R' | unary: '!' 'X' 'WX' 'F' 'G'
///   primary: 'true' 'false' ident '(' formula ')'
/// Identifiers are [a-z][A-Za-z0-9_]*.  '#' starts a line comment.
/// Throws ParseError with 1-based line/column.
FormulaId parse_formula(FormulaArena& arena, std::string_view text);

/// Deterministic printing with minimal parentheses; parse(print(f)) is
/// structurally equal to f.
std::string print_formula(const FormulaArena& arena, FormulaId f);

// ── Traces ──────────────────────────────────────────────────────────────────
// A trace is a non-empty finite sequence of states; a state is a set of
// atoms, stored as a bitset indexed by AtomId.

class Trace {
public:
    Trace(std::size_t atom_capacity, std::size_t length)
        : len_(length),
          wps_((atom_capacity + 63) / 64),
          bits_(len_ * (wps_ ? wps_ : 1), 0) {
        if (length == 0) throw std::invalid_argument("trace must be non-empty");
        if (wps_ == 0) wps_ = 1;
    }

    std::size_t length() const { return len_; }

    bool test(std::size_t t, AtomId a) const {
        return (bits_[t * wps_ + (a >> 6)] >> (a & 63)) & 1u;
    }
    void set(std::size_t t, AtomId a, bool value = true) {
        std::uint64_t& w = bits_[t * wps_ + (a >> 6)];
        if (value) w |= std::uint64_t{1} << (a & 63);
        else       w &= ~(std::uint64_t{1} << (a & 63));
    }

private:
    std::size_t len_;
    std::size_t wps_;
    std::vector<std::uint64_t> bits_;
};

/// Ground-truth finite-trace satisfaction: pi,i |= f.  Handles every kind,
/// including sugar, directly from the defining semantics.  Strong Next is
/// false at the last position.  Throws std::out_of_range for bad positions.
bool evaluate(const FormulaArena& arena, const Trace& pi, FormulaId f,
              std::size_t position);

// ── Conjunctive specifications ──────────────────────────────────────────────

/// Top-down recursive conjunct split: an And contributes the splits of both
/// children, anything else is a single conjunct, left to right.
std::vector<FormulaId> split_conjunctive(const FormulaArena& arena, FormulaId f);

/// Splits only at the root: an And root yields its two immediate children,
/// anything else a single conjunct.
std::vector<FormulaId> split_root(const FormulaArena& arena, FormulaId f);

class ConjunctiveSpec {
public:
    ConjunctiveSpec(FormulaArena& arena, std::vector<FormulaId> conjuncts);

    FormulaArena& arena() const { return *arena_; }
    std::size_t size() const { return conjuncts_.size(); }

    /// Conjunct for 1-based index i (selector identity).
    FormulaId conjunct(std::size_t i) const { return conjuncts_.at(i - 1); }
    std::span<const FormulaId> conjuncts() const { return conjuncts_; }

    /// Union of atoms over all conjuncts, first-occurrence order.
    std::span<const AtomId> alphabet() const { return alphabet_; }

private:
    FormulaArena* arena_;
    std::vector<FormulaId> conjuncts_;
    std::vector<AtomId> alphabet_;
};

} // namespace ltlfmuc

#endif
