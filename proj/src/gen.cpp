#include "ltlfmuc/gen.hpp"

#include "ltlfmuc/formula.hpp"

#include <random>
#include <stdexcept>

namespace ltlfmuc {
namespace {

std::string atom_name(std::size_t i) {
    if (i < 26) return std::string(1, static_cast<char>('a' + i));
    return "p" + std::to_string(i);
}

class Gen {
public:
    explicit Gen(const GenOptions& o) : o_(o), rng_(o.seed) {}

    FormulaId conjunct() { return formula(o_.max_depth); }

    FormulaArena& arena() { return arena_; }

private:
    // Raw modulo keeps the draw protocol independent of library
    // distribution internals; the bias at these tiny ranges is irrelevant.
    std::uint64_t pick(std::uint64_t n) { return rng_() % n; }

    FormulaId leaf() {
        std::uint64_t r = pick(10);
        if (r == 9) return pick(2) == 0 ? arena_.make_true() : arena_.make_false();
        FormulaId a = arena_.make_atom(atom_name(pick(o_.n_atoms)));
        return r < 6 ? a : arena_.make_not(a);
    }

    // Children are drawn left before right; relying on call-argument
    // evaluation order would make the byte output compiler dependent.
    FormulaId formula(unsigned depth) {
        if (depth == 0) return leaf();
        std::uint64_t op = pick(19);
        if (op <= 1) return leaf();
        if (op <= 3) return arena_.make_not(formula(depth - 1));
        if (op <= 9 || op == 10) {
            if (op <= 5) {
                FormulaId l = formula(depth - 1);
                FormulaId r = formula(depth - 1);
                return arena_.make_and(l, r);
            }
            if (op <= 7) {
                FormulaId l = formula(depth - 1);
                FormulaId r = formula(depth - 1);
                return arena_.make_or(l, r);
            }
            if (op <= 9) return arena_.make_next(formula(depth - 1));
            return arena_.make_weak_next(formula(depth - 1));
        }
        if (op <= 12) {
            FormulaId l = formula(depth - 1);
            FormulaId r = formula(depth - 1);
            return arena_.make_until(l, r);
        }
        if (op == 13) {
            FormulaId l = formula(depth - 1);
            FormulaId r = formula(depth - 1);
            return arena_.make_release(l, r);
        }
        if (op <= 15) return arena_.make_eventually(formula(depth - 1));
        if (op <= 17) return arena_.make_globally(formula(depth - 1));
        FormulaId l = formula(depth - 1);
        FormulaId r = formula(depth - 1);
        return arena_.make_implies(l, r);
    }

    const GenOptions& o_;
    std::mt19937_64 rng_;
    FormulaArena arena_;
};

} // namespace

std::vector<std::string> generate_instance(const GenOptions& options) {
    if (options.n_conjuncts == 0) throw std::invalid_argument("need at least one conjunct");
    if (options.n_atoms == 0) throw std::invalid_argument("need at least one atom");
    Gen gen(options);
    std::vector<std::string> out;
    out.reserve(options.n_conjuncts);
    for (std::size_t i = 0; i < options.n_conjuncts; ++i)
        out.push_back(print_formula(gen.arena(), gen.conjunct()));
    return out;
}

} // namespace ltlfmuc
