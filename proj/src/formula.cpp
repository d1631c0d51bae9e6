#include "ltlfmuc/formula.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_set>

namespace ltlfmuc {

const char* node_kind_name(NodeKind k) noexcept {
    switch (k) {
        case NodeKind::Atom:       return "atom";
        case NodeKind::True:       return "true";
        case NodeKind::False:      return "false";
        case NodeKind::Not:        return "not";
        case NodeKind::And:        return "and";
        case NodeKind::Or:         return "or";
        case NodeKind::Next:       return "next";
        case NodeKind::WeakNext:   return "weak_next";
        case NodeKind::Until:      return "until";
        case NodeKind::Release:    return "release";
        case NodeKind::Eventually: return "eventually";
        case NodeKind::Globally:   return "globally";
        case NodeKind::Implies:    return "implies";
    }
    return "?";
}

bool is_core_kind(NodeKind k) noexcept {
    switch (k) {
        case NodeKind::Atom:
        case NodeKind::True:
        case NodeKind::Not:
        case NodeKind::And:
        case NodeKind::Or:
        case NodeKind::Next:
        case NodeKind::Until:
        case NodeKind::Release:
            return true;
        default:
            return false;
    }
}

std::size_t FormulaArena::NodeKeyHash::operator()(const NodeKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.kind);
    auto mix = [&h](std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(k.atom);
    mix(k.c0);
    mix(k.c1);
    return static_cast<std::size_t>(h);
}

FormulaArena::FormulaArena() = default;

FormulaId FormulaArena::intern(NodeKind kind, AtomId atom, FormulaId c0, FormulaId c1) {
    NodeKey key{kind, atom, c0, c1};
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;
    FormulaId id = static_cast<FormulaId>(nodes_.size());
    nodes_.push_back(FormulaNode{kind, atom, {c0, c1}});
    intern_.emplace(key, id);
    return id;
}

FormulaId FormulaArena::make_atom(std::string_view name) {
    auto it = atom_ids_.find(std::string(name));
    AtomId a;
    if (it != atom_ids_.end()) {
        a = it->second;
    } else {
        a = static_cast<AtomId>(atom_names_.size());
        atom_names_.emplace_back(name);
        atom_ids_.emplace(atom_names_.back(), a);
    }
    return intern(NodeKind::Atom, a, kInvalidFormula, kInvalidFormula);
}

AtomId FormulaArena::find_atom(std::string_view name) const {
    auto it = atom_ids_.find(std::string(name));
    return it == atom_ids_.end() ? static_cast<AtomId>(kInvalidFormula) : it->second;
}

FormulaId FormulaArena::make_true() {
    return intern(NodeKind::True, 0, kInvalidFormula, kInvalidFormula);
}
FormulaId FormulaArena::make_false() {
    return intern(NodeKind::False, 0, kInvalidFormula, kInvalidFormula);
}
FormulaId FormulaArena::make_not(FormulaId f) {
    return intern(NodeKind::Not, 0, f, kInvalidFormula);
}
FormulaId FormulaArena::make_and(FormulaId lhs, FormulaId rhs) {
    return intern(NodeKind::And, 0, lhs, rhs);
}
FormulaId FormulaArena::make_or(FormulaId lhs, FormulaId rhs) {
    return intern(NodeKind::Or, 0, lhs, rhs);
}
FormulaId FormulaArena::make_next(FormulaId f) {
    return intern(NodeKind::Next, 0, f, kInvalidFormula);
}
FormulaId FormulaArena::make_weak_next(FormulaId f) {
    return intern(NodeKind::WeakNext, 0, f, kInvalidFormula);
}
FormulaId FormulaArena::make_until(FormulaId lhs, FormulaId rhs) {
    return intern(NodeKind::Until, 0, lhs, rhs);
}
FormulaId FormulaArena::make_release(FormulaId lhs, FormulaId rhs) {
    return intern(NodeKind::Release, 0, lhs, rhs);
}
FormulaId FormulaArena::make_eventually(FormulaId f) {
    return intern(NodeKind::Eventually, 0, f, kInvalidFormula);
}
FormulaId FormulaArena::make_globally(FormulaId f) {
    return intern(NodeKind::Globally, 0, f, kInvalidFormula);
}
FormulaId FormulaArena::make_implies(FormulaId lhs, FormulaId rhs) {
    return intern(NodeKind::Implies, 0, lhs, rhs);
}

// Sugar is eliminated by the textbook equivalences:
//   false   = !true            WX f   = !X!f
//   F f     = true U f         G f    = !(true U !f)
//   f -> g  = !f | g
FormulaId FormulaArena::desugar(FormulaId f) {
    auto it = desugar_memo_.find(f);
    if (it != desugar_memo_.end()) return it->second;
    const FormulaNode n = nodes_[f];
    FormulaId out;
    switch (n.kind) {
        case NodeKind::Atom:
        case NodeKind::True:
            out = f;
            break;
        case NodeKind::False:
            out = make_not(make_true());
            break;
        case NodeKind::Not:
            out = make_not(desugar(n.child[0]));
            break;
        case NodeKind::And:
            out = make_and(desugar(n.child[0]), desugar(n.child[1]));
            break;
        case NodeKind::Or:
            out = make_or(desugar(n.child[0]), desugar(n.child[1]));
            break;
        case NodeKind::Next:
            out = make_next(desugar(n.child[0]));
            break;
        case NodeKind::WeakNext:
            out = make_not(make_next(make_not(desugar(n.child[0]))));
            break;
        case NodeKind::Until:
            out = make_until(desugar(n.child[0]), desugar(n.child[1]));
            break;
        case NodeKind::Release:
            out = make_release(desugar(n.child[0]), desugar(n.child[1]));
            break;
        case NodeKind::Eventually:
            out = make_until(make_true(), desugar(n.child[0]));
            break;
        case NodeKind::Globally:
            out = make_not(make_until(make_true(), make_not(desugar(n.child[0]))));
            break;
        case NodeKind::Implies:
            out = make_or(make_not(desugar(n.child[0])), desugar(n.child[1]));
            break;
        default:
            assert(false);
            out = f;
    }
    desugar_memo_.emplace(f, out);
    return out;
}

FormulaId FormulaArena::nnf(FormulaId f) { return nnf_pos(f); }

FormulaId FormulaArena::nnf_pos(FormulaId f) {
    auto it = nnf_pos_memo_.find(f);
    if (it != nnf_pos_memo_.end()) return it->second;
    const FormulaNode n = nodes_[f];
    FormulaId out;
    switch (n.kind) {
        case NodeKind::Atom:
        case NodeKind::True:
            out = f;
            break;
        case NodeKind::Not:
            out = nnf_neg(n.child[0]);
            break;
        case NodeKind::And:
            out = make_and(nnf_pos(n.child[0]), nnf_pos(n.child[1]));
            break;
        case NodeKind::Or:
            out = make_or(nnf_pos(n.child[0]), nnf_pos(n.child[1]));
            break;
        case NodeKind::Next:
            out = make_next(nnf_pos(n.child[0]));
            break;
        case NodeKind::Until:
            out = make_until(nnf_pos(n.child[0]), nnf_pos(n.child[1]));
            break;
        case NodeKind::Release:
            out = make_release(nnf_pos(n.child[0]), nnf_pos(n.child[1]));
            break;
        default:
            assert(!"nnf requires a desugared formula");
            out = f;
    }
    nnf_pos_memo_.emplace(f, out);
    return out;
}

// Negations are pushed with the finite-trace dualities !Xf = WX!f,
// !(f U g) = !f R !g and !(f R g) = !f U !g.
FormulaId FormulaArena::nnf_neg(FormulaId f) {
    auto it = nnf_neg_memo_.find(f);
    if (it != nnf_neg_memo_.end()) return it->second;
    const FormulaNode n = nodes_[f];
    FormulaId out;
    switch (n.kind) {
        case NodeKind::Atom:
            out = make_not(f);
            break;
        case NodeKind::True:
            out = make_false();
            break;
        case NodeKind::Not:
            out = nnf_pos(n.child[0]);
            break;
        case NodeKind::And:
            out = make_or(nnf_neg(n.child[0]), nnf_neg(n.child[1]));
            break;
        case NodeKind::Or:
            out = make_and(nnf_neg(n.child[0]), nnf_neg(n.child[1]));
            break;
        case NodeKind::Next:
            out = make_weak_next(nnf_neg(n.child[0]));
            break;
        case NodeKind::Until:
            out = make_release(nnf_neg(n.child[0]), nnf_neg(n.child[1]));
            break;
        case NodeKind::Release:
            out = make_until(nnf_neg(n.child[0]), nnf_neg(n.child[1]));
            break;
        default:
            assert(!"nnf requires a desugared formula");
            out = make_not(f);
    }
    nnf_neg_memo_.emplace(f, out);
    return out;
}

void FormulaArena::collect_atoms(FormulaId f, std::vector<AtomId>& out) const {
    std::unordered_set<FormulaId> seen;
    std::unordered_set<AtomId> have(out.begin(), out.end());
    std::vector<FormulaId> stack{f};
    while (!stack.empty()) {
        FormulaId id = stack.back();
        stack.pop_back();
        if (!seen.insert(id).second) continue;
        const FormulaNode& n = nodes_[id];
        if (n.kind == NodeKind::Atom) {
            if (have.insert(n.atom).second) out.push_back(n.atom);
            continue;
        }
        // Right child pushed first so the left subtree is visited first.
        if (n.child[1] != kInvalidFormula) stack.push_back(n.child[1]);
        if (n.child[0] != kInvalidFormula) stack.push_back(n.child[0]);
    }
}

bool evaluate(const FormulaArena& arena, const Trace& pi, FormulaId f,
              std::size_t position) {
    const std::size_t len = pi.length();
    if (position >= len) throw std::out_of_range("evaluate: position past trace end");
    const FormulaNode& n = arena.node(f);
    switch (n.kind) {
        case NodeKind::Atom:
            return pi.test(position, n.atom);
        case NodeKind::True:
            return true;
        case NodeKind::False:
            return false;
        case NodeKind::Not:
            return !evaluate(arena, pi, n.child[0], position);
        case NodeKind::And:
            return evaluate(arena, pi, n.child[0], position) &&
                   evaluate(arena, pi, n.child[1], position);
        case NodeKind::Or:
            return evaluate(arena, pi, n.child[0], position) ||
                   evaluate(arena, pi, n.child[1], position);
        case NodeKind::Next:
            return position + 1 < len && evaluate(arena, pi, n.child[0], position + 1);
        case NodeKind::WeakNext:
            return position + 1 >= len || evaluate(arena, pi, n.child[0], position + 1);
        case NodeKind::Until:
            for (std::size_t j = position; j < len; ++j) {
                if (evaluate(arena, pi, n.child[1], j)) return true;
                if (!evaluate(arena, pi, n.child[0], j)) return false;
            }
            return false;
        case NodeKind::Release:
            // f R g on a finite suffix: g holds everywhere up to and
            // including the first f-position, or through the end.
            for (std::size_t j = position; j < len; ++j) {
                if (!evaluate(arena, pi, n.child[1], j)) return false;
                if (evaluate(arena, pi, n.child[0], j)) return true;
            }
            return true;
        case NodeKind::Eventually:
            for (std::size_t j = position; j < len; ++j)
                if (evaluate(arena, pi, n.child[0], j)) return true;
            return false;
        case NodeKind::Globally:
            for (std::size_t j = position; j < len; ++j)
                if (!evaluate(arena, pi, n.child[0], j)) return false;
            return true;
        case NodeKind::Implies:
            return !evaluate(arena, pi, n.child[0], position) ||
                   evaluate(arena, pi, n.child[1], position);
    }
    assert(false);
    return false;
}

std::vector<FormulaId> split_conjunctive(const FormulaArena& arena, FormulaId f) {
    std::vector<FormulaId> out;
    // Explicit stack, right child deferred, keeps left-to-right order.
    std::vector<FormulaId> stack{f};
    while (!stack.empty()) {
        FormulaId id = stack.back();
        stack.pop_back();
        const FormulaNode& n = arena.node(id);
        if (n.kind == NodeKind::And) {
            stack.push_back(n.child[1]);
            stack.push_back(n.child[0]);
        } else {
            out.push_back(id);
        }
    }
    return out;
}

std::vector<FormulaId> split_root(const FormulaArena& arena, FormulaId f) {
    const FormulaNode& n = arena.node(f);
    if (n.kind == NodeKind::And) return {n.child[0], n.child[1]};
    return {f};
}

ConjunctiveSpec::ConjunctiveSpec(FormulaArena& arena, std::vector<FormulaId> conjuncts)
    : arena_(&arena), conjuncts_(std::move(conjuncts)) {
    if (conjuncts_.empty())
        throw std::invalid_argument("a conjunctive specification needs at least one conjunct");
    for (FormulaId c : conjuncts_) arena_->collect_atoms(c, alphabet_);
}

} // namespace ltlfmuc
