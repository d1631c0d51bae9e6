// MUC enumeration driver.
//
// Algorithm: iterative deepening over probe depth.  Start at k = 1; pull
// MUSes of the depth-k probe and certify each with the complete oracle.
// A certified-unsatisfiable MUS is a MUC and is emitted immediately; a
// satisfiable one (false positive) has a minimal model of some length
// k' > k, so the probe is rebuilt at depth k' and enumeration restarts.
// A pass that drains the MUS stream without hitting a false positive
// proves the current depth complete and the emitted set is exactly the
// MUC set of the input.
//
// Certified and disproved candidates are cached across restarts: certified
// sets are never re-certified (and their supersets are pre-excluded from
// later maps, which cannot hide any MUC because supersets of an
// unsatisfiable set are never minimal); disproved sets re-trigger
// deepening without consulting the oracle again.

#ifndef LTLFMUC_ENGINE_HPP
#define LTLFMUC_ENGINE_HPP

#include "ltlfmuc/formula.hpp"
#include "ltlfmuc/ltlf_sat.hpp"
#include "ltlfmuc/probe.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ltlfmuc {

struct EngineOptions {
    unsigned max_k = 0;        // 0: no cap beyond the 2^n bound
    double timeout_s = 0.0;    // wall clock; 0: none
    bool pipelined = false;    // overlap MUS generation and certification
    bool stop_after_first = false;
    bool verify_emissions = false;  // re-check the MUC definition per emission
    ProbeLimits probe_limits;
    LtlfLimits ltlf_limits;
};

struct MucReport {
    SelectorSet conjuncts;            // 1-based indices into the spec
    std::vector<std::string> texts;   // printed conjuncts, same order
    unsigned k = 0;                   // depth the MUS was generated at
    double t_ms = 0.0;                // wall time since run start
};

enum class RunOutcome : std::uint8_t {
    Complete,      // enumeration provably finished (or first MUC delivered)
    Timeout,       // wall-clock deadline hit; emitted MUCs remain valid
    Resource,      // a budget (variables, states, depth cap) was exhausted
    SinkFailure,   // the event sink refused an event
};

struct RunStats {
    std::size_t n_mucs = 0;
    bool complete = false;
    RunOutcome outcome = RunOutcome::Complete;
    unsigned final_k = 0;
    std::size_t muc_size_min = 0;
    double muc_size_med = 0.0;
    std::size_t muc_size_max = 0;
    double gen_ms = 0.0;    // CPU time generating MUS candidates
    double cert_ms = 0.0;   // CPU time certifying candidates
    double wall_ms = 0.0;
    std::string message;    // failure detail, empty when complete
};

struct MucEvent {
    enum class Type : std::uint8_t { Muc, Deepen, Disproved, Stats, Error };
    Type type{};
    MucReport muc;              // Muc
    unsigned from_k = 0;        // Deepen
    unsigned to_k = 0;          // Deepen
    SelectorSet witness_of;     // Deepen: the disproved candidate
    SelectorSet disproved;      // Disproved
    unsigned k = 0;             // Disproved: probe depth
    std::size_t witness_len = 0;  // Disproved: minimal model length
    RunStats stats;             // Stats: mirrors the run's return value
    std::string message;        // Error
};

/// Returns false to abort the run (treated as a sink failure).
using EventSink = std::function<bool(const MucEvent&)>;

/// Iterative-deepening enumeration of all MUCs.  Events are pushed to the
/// sink as they happen; a final Stats event mirrors the returned value.
RunStats enumerate_mucs(const ConjunctiveSpec& spec, const EngineOptions& options,
                        const EventSink& sink);

/// Single fixed-depth pass.  MUSes of the depth-k probe are certified in
/// stream order and only the certified-unsatisfiable ones are emitted;
/// satisfiable ones produce Disproved events but no deepening.
RunStats enumerate_k_mucs(const ConjunctiveSpec& spec, unsigned k,
                          const EngineOptions& options, const EventSink& sink);

/// First MUC or nothing (satisfiable specification).
std::optional<MucReport> find_one_muc(const ConjunctiveSpec& spec,
                                      const EngineOptions& options);

} // namespace ltlfmuc

#endif
