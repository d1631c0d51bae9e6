// Random conjunctive instances for stress tests and benchmarks.

#ifndef LTLFMUC_GEN_HPP
#define LTLFMUC_GEN_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ltlfmuc {

struct GenOptions {
    std::size_t n_conjuncts = 20;
    std::size_t n_atoms = 5;      // alphabet size, at most one is used per leaf
    unsigned max_depth = 3;       // operator nesting above the leaves
    std::uint64_t seed = 0;
};

/// One printed conjunct per entry.  The draw protocol is fixed: a single
/// mt19937_64 stream seeded with options.seed, consumed left to right per
/// conjunct, so a seed pins the instance bytes across runs and platforms.
/// Throws std::invalid_argument for zero conjuncts or atoms.
std::vector<std::string> generate_instance(const GenOptions& options);

} // namespace ltlfmuc

#endif
