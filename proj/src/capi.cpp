#include "ltlfmuc.h"

#include "ltlfmuc/engine.hpp"
#include "ltlfmuc/formula.hpp"
#include "ltlfmuc/gen.hpp"
#include "ltlfmuc/ltlf_sat.hpp"
#include "ltlfmuc/reify.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

using namespace ltlfmuc;

struct muc_spec {
    FormulaArena arena;
    std::unique_ptr<ConjunctiveSpec> spec;
};

namespace {

thread_local std::string g_last_error;

void set_error(std::string msg) { g_last_error = std::move(msg); }

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

EngineOptions to_engine_options(const muc_options* opt) {
    EngineOptions eo;
    eo.pipelined = true;
    if (!opt) return eo;
    eo.max_k = opt->max_k;
    eo.timeout_s = opt->timeout_s;
    eo.pipelined = opt->deterministic == 0;
    eo.verify_emissions = opt->verify != 0;
    if (opt->var_budget) eo.probe_limits.var_budget = opt->var_budget;
    if (opt->state_budget) eo.ltlf_limits.state_budget = opt->state_budget;
    return eo;
}

void to_c_stats(const RunStats& in, muc_run_stats& out) {
    out.n_mucs = in.n_mucs;
    out.complete = in.complete ? 1 : 0;
    out.final_k = in.final_k;
    out.muc_size_min = in.muc_size_min;
    out.muc_size_max = in.muc_size_max;
    out.muc_size_med = in.muc_size_med;
    out.gen_ms = in.gen_ms;
    out.cert_ms = in.cert_ms;
    out.wall_ms = in.wall_ms;
}

muc_status from_outcome(const RunStats& st) {
    switch (st.outcome) {
        case RunOutcome::Complete:
            return MUC_OK;
        case RunOutcome::Timeout:
            set_error(st.message.empty() ? "wall-clock timeout" : st.message);
            return MUC_ERR_TIMEOUT;
        case RunOutcome::Resource:
            set_error(st.message.empty() ? "resource budget exceeded"
                                         : st.message);
            return MUC_ERR_RESOURCE;
        case RunOutcome::SinkFailure:
            set_error("event callback aborted the run");
            return MUC_ERR_CALLBACK;
    }
    set_error("unknown outcome");
    return MUC_ERR_INVALID;
}

EventSink make_sink(muc_event_cb cb, void* user) {
    return [cb, user](const MucEvent& e) -> bool {
        if (!cb) return true;
        muc_event ev{};
        muc_run_stats st{};
        switch (e.type) {
            case MucEvent::Type::Muc:
                ev.type = MUC_EVENT_MUC;
                ev.conjuncts = e.muc.conjuncts.data();
                ev.n_conjuncts = e.muc.conjuncts.size();
                ev.k = e.muc.k;
                ev.t_ms = e.muc.t_ms;
                break;
            case MucEvent::Type::Deepen:
                ev.type = MUC_EVENT_DEEPEN;
                ev.conjuncts = e.witness_of.data();
                ev.n_conjuncts = e.witness_of.size();
                ev.from_k = e.from_k;
                ev.to_k = e.to_k;
                break;
            case MucEvent::Type::Disproved:
                ev.type = MUC_EVENT_DISPROVED;
                ev.conjuncts = e.disproved.data();
                ev.n_conjuncts = e.disproved.size();
                ev.k = e.k;
                ev.witness_len = e.witness_len;
                break;
            case MucEvent::Type::Stats:
                ev.type = MUC_EVENT_STATS;
                to_c_stats(e.stats, st);
                ev.stats = &st;
                break;
            case MucEvent::Type::Error:
                ev.type = MUC_EVENT_ERROR;
                ev.message = e.message.c_str();
                break;
        }
        return cb(&ev, user) == 0;
    };
}

muc_status build_spec(std::unique_ptr<muc_spec> holder,
                      std::vector<FormulaId> conjuncts, muc_spec** out) {
    try {
        holder->spec = std::make_unique<ConjunctiveSpec>(holder->arena,
                                                         std::move(conjuncts));
    } catch (const std::exception& e) {
        set_error(e.what());
        return MUC_ERR_INVALID;
    }
    *out = holder.release();
    return MUC_OK;
}

// Single-shot timer used by entry points that run outside the engine.
class Deadline {
public:
    Deadline(double seconds, std::atomic<bool>& flag) : flag_(flag) {
        thread_ = std::thread([this, seconds] {
            std::unique_lock<std::mutex> lock(mu_);
            if (!cv_.wait_for(lock, std::chrono::duration<double>(seconds),
                              [this] { return done_; }))
                flag_.store(true, std::memory_order_relaxed);
        });
    }
    ~Deadline() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            done_ = true;
        }
        cv_.notify_all();
        thread_.join();
    }

private:
    std::atomic<bool>& flag_;
    std::mutex mu_;
    std::condition_variable cv_;
    bool done_ = false;
    std::thread thread_;
};

} // namespace

extern "C" {

void muc_options_init(muc_options* opt) {
    if (!opt) return;
    *opt = muc_options{};
}

muc_status muc_spec_parse(const char* text, int split_recursive,
                          muc_spec** out) {
    if (!text || !out) {
        set_error("null argument");
        return MUC_ERR_INVALID;
    }
    *out = nullptr;
    auto holder = std::make_unique<muc_spec>();
    std::vector<FormulaId> conjuncts;
    try {
        FormulaId root = parse_formula(holder->arena, text);
        conjuncts = split_recursive ? split_conjunctive(holder->arena, root)
                                    : split_root(holder->arena, root);
    } catch (const ParseError& e) {
        set_error("parse error at line " + std::to_string(e.line()) +
                  ", column " + std::to_string(e.column()) + ": " + e.what());
        return MUC_ERR_PARSE;
    }
    return build_spec(std::move(holder), std::move(conjuncts), out);
}

muc_status muc_spec_parse_lines(const char* const* lines, size_t n_lines,
                                muc_spec** out) {
    if (!lines || !out) {
        set_error("null argument");
        return MUC_ERR_INVALID;
    }
    *out = nullptr;
    auto holder = std::make_unique<muc_spec>();
    std::vector<FormulaId> conjuncts;
    for (size_t i = 0; i < n_lines; ++i) {
        if (!lines[i]) {
            set_error("null line at index " + std::to_string(i));
            return MUC_ERR_INVALID;
        }
        try {
            conjuncts.push_back(parse_formula(holder->arena, lines[i]));
        } catch (const ParseError& e) {
            set_error("parse error in conjunct " + std::to_string(i + 1) +
                      " at column " + std::to_string(e.column()) + ": " +
                      e.what());
            return MUC_ERR_PARSE;
        }
    }
    return build_spec(std::move(holder), std::move(conjuncts), out);
}

void muc_spec_free(muc_spec* spec) { delete spec; }

size_t muc_spec_conjunct_count(const muc_spec* spec) {
    return spec && spec->spec ? spec->spec->size() : 0;
}

char* muc_spec_conjunct_text(const muc_spec* spec, size_t index) {
    if (!spec || !spec->spec || index < 1 || index > spec->spec->size()) {
        set_error("conjunct index out of range");
        return nullptr;
    }
    return dup_string(
        print_formula(spec->arena, spec->spec->conjunct(index)));
}

muc_status muc_enumerate(muc_spec* spec, const muc_options* opt,
                         muc_event_cb cb, void* user,
                         muc_run_stats* stats_out) {
    if (!spec || !spec->spec) {
        set_error("null specification");
        return MUC_ERR_INVALID;
    }
    RunStats st = enumerate_mucs(*spec->spec, to_engine_options(opt),
                                 make_sink(cb, user));
    if (stats_out) to_c_stats(st, *stats_out);
    return from_outcome(st);
}

muc_status muc_enumerate_k(muc_spec* spec, uint64_t k, const muc_options* opt,
                           muc_event_cb cb, void* user,
                           muc_run_stats* stats_out) {
    if (!spec || !spec->spec) {
        set_error("null specification");
        return MUC_ERR_INVALID;
    }
    if (k == 0) {
        set_error("probe depth must be at least 1");
        return MUC_ERR_INVALID;
    }
    RunStats st = enumerate_k_mucs(*spec->spec, k, to_engine_options(opt),
                                   make_sink(cb, user));
    if (stats_out) to_c_stats(st, *stats_out);
    return from_outcome(st);
}

muc_status muc_find_one(muc_spec* spec, const muc_options* opt,
                        size_t** conjuncts_out, size_t* n_out,
                        uint64_t* k_out) {
    if (!spec || !spec->spec || !conjuncts_out || !n_out) {
        set_error("null argument");
        return MUC_ERR_INVALID;
    }
    *conjuncts_out = nullptr;
    *n_out = 0;
    EngineOptions eo = to_engine_options(opt);
    eo.stop_after_first = true;
    std::optional<MucReport> found;
    RunStats st = enumerate_mucs(*spec->spec, eo, [&](const MucEvent& e) {
        if (e.type == MucEvent::Type::Muc && !found) found = e.muc;
        return true;
    });
    muc_status rc = from_outcome(st);
    if (rc != MUC_OK) return rc;
    if (found) {
        size_t n = found->conjuncts.size();
        auto* v = static_cast<size_t*>(std::malloc(n * sizeof(size_t)));
        if (!v) {
            set_error("out of memory");
            return MUC_ERR_RESOURCE;
        }
        std::memcpy(v, found->conjuncts.data(), n * sizeof(size_t));
        *conjuncts_out = v;
        *n_out = n;
        if (k_out) *k_out = found->k;
    }
    return MUC_OK;
}

muc_status muc_check_sat(muc_spec* spec, const muc_options* opt,
                         uint64_t* min_length_out) {
    if (!spec || !spec->spec || !min_length_out) {
        set_error("null argument");
        return MUC_ERR_INVALID;
    }
    LtlfLimits limits;
    if (opt && opt->state_budget) limits.state_budget = opt->state_budget;
    std::atomic<bool> stop{false};
    std::optional<Deadline> deadline;
    if (opt && opt->timeout_s > 0) deadline.emplace(opt->timeout_s, stop);
    SatOutcome r = check_satisfiability(spec->arena, spec->spec->conjuncts(),
                                        limits, &stop);
    switch (r.kind) {
        case SatOutcome::Kind::Sat:
            *min_length_out = r.length;
            return MUC_OK;
        case SatOutcome::Kind::Unsat:
            *min_length_out = 0;
            return MUC_OK;
        case SatOutcome::Kind::Interrupted:
            set_error("wall-clock timeout");
            return MUC_ERR_TIMEOUT;
        case SatOutcome::Kind::BudgetExceeded:
            set_error("state budget exceeded");
            return MUC_ERR_RESOURCE;
    }
    set_error("unknown outcome");
    return MUC_ERR_INVALID;
}

char* muc_export_asp(muc_spec* spec, uint64_t k) {
    if (!spec || !spec->spec) {
        set_error("null specification");
        return nullptr;
    }
    if (k == 0) {
        set_error("probe depth must be at least 1");
        return nullptr;
    }
    return dup_string(
        export_asp_facts(*spec->spec, static_cast<unsigned>(k)));
}

char* muc_generate(size_t n_conjuncts, size_t n_atoms, size_t max_depth,
                   uint64_t seed) {
    GenOptions g;
    g.n_conjuncts = n_conjuncts;
    g.n_atoms = n_atoms;
    g.max_depth = max_depth;
    g.seed = seed;
    try {
        std::string joined;
        for (const std::string& line : generate_instance(g)) {
            joined += line;
            joined += '\n';
        }
        return dup_string(joined);
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void muc_string_free(char* s) { std::free(s); }
void muc_indices_free(size_t* v) { std::free(v); }

const char* muc_last_error(void) { return g_last_error.c_str(); }

const char* muc_version(void) { return "0.1.0"; }

} // extern "C"
