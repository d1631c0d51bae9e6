#include "ltlfmuc/engine.hpp"

#include "ltlfmuc/mus.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <deque>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_set>
#include <utility>

namespace ltlfmuc {
namespace {

double thread_cpu_ms() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) * 1e3 +
           static_cast<double>(ts.tv_nsec) * 1e-6;
}

// Accumulates this thread's CPU time into acc for the enclosing scope.
class PhaseTimer {
public:
    explicit PhaseTimer(double& acc) : acc_(acc), t0_(thread_cpu_ms()) {}
    ~PhaseTimer() { acc_ += thread_cpu_ms() - t0_; }
    PhaseTimer(const PhaseTimer&) = delete;
    PhaseTimer& operator=(const PhaseTimer&) = delete;

private:
    double& acc_;
    double t0_;
};

// Sets the flag once the deadline passes; disarmed by destruction.
class Watchdog {
public:
    Watchdog(std::atomic<bool>& flag, double seconds) {
        if (seconds <= 0.0) return;
        thread_ = std::thread([this, &flag, seconds] {
            std::unique_lock<std::mutex> lock(mutex_);
            if (!cv_.wait_for(lock, std::chrono::duration<double>(seconds),
                              [this] { return stop_; }))
                flag.store(true, std::memory_order_relaxed);
        });
    }
    ~Watchdog() {
        if (!thread_.joinable()) return;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            stop_ = true;
        }
        cv_.notify_all();
        thread_.join();
    }

private:
    std::thread thread_;
    std::mutex mutex_;
    std::condition_variable cv_;
    bool stop_ = false;
};

// Any model of the spec's conjunction has a minimal length bounded by the
// number of reachable obligation states, itself at most 2^n for n closure
// formulas.  Deepening targets are asserted against this bound.
std::uint64_t depth_cap(const ConjunctiveSpec& spec) {
    FormulaArena& arena = spec.arena();
    std::unordered_set<FormulaId> seen;
    std::vector<FormulaId> stack;
    for (FormulaId c : spec.conjuncts()) stack.push_back(arena.nnf(arena.desugar(c)));
    while (!stack.empty()) {
        FormulaId f = stack.back();
        stack.pop_back();
        if (!seen.insert(f).second) continue;
        const FormulaNode& nd = arena.node(f);
        for (FormulaId ch : nd.child)
            if (ch != kInvalidFormula) stack.push_back(ch);
    }
    if (seen.size() >= 63) return std::numeric_limits<std::uint64_t>::max();
    return std::uint64_t{1} << seen.size();
}

// Bounded single-producer single-consumer queue for pipelined passes.
class Channel {
public:
    bool push(MusEnumerator::Item item) {
        std::unique_lock<std::mutex> lock(mutex_);
        can_push_.wait(lock, [this] { return queue_.size() < kCap || cancelled_; });
        if (cancelled_) return false;
        queue_.push_back(std::move(item));
        can_pop_.notify_one();
        return true;
    }
    std::optional<MusEnumerator::Item> pop() {
        std::unique_lock<std::mutex> lock(mutex_);
        can_pop_.wait(lock, [this] { return !queue_.empty() || closed_; });
        if (queue_.empty()) return std::nullopt;
        MusEnumerator::Item item = std::move(queue_.front());
        queue_.pop_front();
        can_push_.notify_one();
        return item;
    }
    void close() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            closed_ = true;
        }
        can_pop_.notify_all();
    }
    void cancel() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            cancelled_ = true;
        }
        can_push_.notify_all();
    }

private:
    static constexpr std::size_t kCap = 64;
    std::mutex mutex_;
    std::condition_variable can_push_, can_pop_;
    std::deque<MusEnumerator::Item> queue_;
    bool closed_ = false;
    bool cancelled_ = false;
};

enum class StepAction : std::uint8_t { Continue, Finished, Deepen, Stop };

class Runner {
public:
    Runner(const ConjunctiveSpec& spec, const EngineOptions& options,
           const EventSink& sink, bool fixed_depth, unsigned start_k)
        : spec_(spec), opt_(options), sink_(sink), fixed_(fixed_depth),
          cur_k_(start_k) {}

    RunStats run() {
        t0_ = std::chrono::steady_clock::now();
        cap_ = depth_cap(spec_);
        Watchdog watchdog(interrupt_, opt_.timeout_s);
        for (;;) {
            StepAction act;
            try {
                act = opt_.pipelined ? run_pass_pipelined() : run_pass();
            } catch (const ResourceLimitError& e) {
                fail(RunOutcome::Resource, e.what());
                act = StepAction::Stop;
            }
            if (act == StepAction::Finished) {
                stats_.complete = true;
                break;
            }
            if (act == StepAction::Stop) break;
            assert(act == StepAction::Deepen && !fixed_);
            assert(next_k_ > cur_k_);
            assert(static_cast<std::uint64_t>(next_k_) <= cap_);
            if (opt_.max_k != 0 && next_k_ > opt_.max_k) {
                fail(RunOutcome::Resource, "required depth exceeds the max-k cap");
                break;
            }
            cur_k_ = next_k_;
        }
        finish_stats();
        return stats_;
    }

private:
    struct CacheEntry {
        bool certified;       // true: proven unsatisfiable at every depth
        std::size_t len;      // otherwise: minimal model length
    };

    double wall_ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0_)
            .count();
    }

    bool emit(MucEvent ev) {
        if (!sink_ok_) return false;
        if (!sink_(ev)) {
            sink_ok_ = false;
            if (stats_.outcome == RunOutcome::Complete) {
                stats_.outcome = RunOutcome::SinkFailure;
                stats_.message = "event sink refused an event";
            }
            return false;
        }
        return true;
    }

    void fail(RunOutcome outcome, std::string message) {
        if (stats_.outcome != RunOutcome::Complete) return;  // keep first cause
        stats_.outcome = outcome;
        stats_.message = message;
        MucEvent ev;
        ev.type = MucEvent::Type::Error;
        ev.message = std::move(message);
        emit(std::move(ev));
    }

    StepAction fail_generation(ProbeResult::Kind kind) {
        if (kind == ProbeResult::Kind::Interrupted)
            fail(RunOutcome::Timeout, "wall-clock timeout");
        else
            fail(RunOutcome::Resource, "probe propagation budget exceeded");
        return StepAction::Stop;
    }

    MucReport make_report(const SelectorSet& m) const {
        MucReport r;
        r.conjuncts = m;
        r.k = cur_k_;
        r.t_ms = wall_ms();
        r.texts.reserve(m.size());
        for (std::size_t i : m)
            r.texts.push_back(print_formula(spec_.arena(), spec_.conjunct(i)));
        return r;
    }

    // Sat: minimality confirmed.  Unsat: some one-smaller subset is
    // unsatisfiable, i.e. the emission would be wrong.
    SatOutcome::Kind verify_minimality(const SelectorSet& m) {
        if (m.size() <= 1) return SatOutcome::Kind::Sat;  // empty rest is satisfiable
        for (std::size_t drop : m) {
            std::vector<FormulaId> fs;
            fs.reserve(m.size() - 1);
            for (std::size_t i : m)
                if (i != drop) fs.push_back(spec_.conjunct(i));
            SatOutcome o =
                check_satisfiability(spec_.arena(), fs, opt_.ltlf_limits, &interrupt_);
            if (!o.sat())
                return o.kind == SatOutcome::Kind::Sat ? SatOutcome::Kind::Unsat
                                                       : o.kind;
        }
        return SatOutcome::Kind::Sat;
    }

    StepAction handle(SelectorSet m) {
        auto it = cache_.find(m);
        if (it != cache_.end()) {
            if (it->second.certified) return StepAction::Continue;  // already emitted
            // Known satisfiable: deepen straight to the cached witness length.
            std::size_t len = it->second.len;
            assert(len > cur_k_);
            MucEvent ev;
            ev.type = MucEvent::Type::Deepen;
            ev.from_k = cur_k_;
            ev.to_k = static_cast<unsigned>(len);
            ev.witness_of = m;
            if (!emit(std::move(ev))) return StepAction::Stop;
            next_k_ = static_cast<unsigned>(len);
            return StepAction::Deepen;
        }

        std::vector<FormulaId> fs;
        fs.reserve(m.size());
        for (std::size_t i : m) fs.push_back(spec_.conjunct(i));
        SatOutcome out;
        {
            PhaseTimer pt(stats_.cert_ms);
            out = check_satisfiability(spec_.arena(), fs, opt_.ltlf_limits, &interrupt_);
        }
        switch (out.kind) {
        case SatOutcome::Kind::Unsat: {
            cache_[m] = {true, 0};
            if (opt_.verify_emissions) {
                SatOutcome::Kind vk;
                {
                    PhaseTimer pt(stats_.cert_ms);
                    vk = verify_minimality(m);
                }
                if (vk == SatOutcome::Kind::Interrupted) {
                    fail(RunOutcome::Timeout, "wall-clock timeout");
                    return StepAction::Stop;
                }
                if (vk == SatOutcome::Kind::BudgetExceeded) {
                    fail(RunOutcome::Resource, "oracle state budget exceeded");
                    return StepAction::Stop;
                }
                if (vk != SatOutcome::Kind::Sat) {
                    fail(RunOutcome::Resource, "emission failed the minimality recheck");
                    return StepAction::Stop;
                }
            }
            MucEvent ev;
            ev.type = MucEvent::Type::Muc;
            ev.muc = make_report(m);
            sizes_.push_back(m.size());
            if (!emit(std::move(ev))) return StepAction::Stop;
            return opt_.stop_after_first ? StepAction::Stop : StepAction::Continue;
        }
        case SatOutcome::Kind::Sat: {
            std::size_t len = out.length;
            cache_[m] = {false, len};
            MucEvent ev;
            ev.type = MucEvent::Type::Disproved;
            ev.disproved = m;
            ev.k = cur_k_;
            ev.witness_len = len;
            if (!emit(std::move(ev))) return StepAction::Stop;
            if (fixed_) return StepAction::Continue;  // single pass, no deepening
            // m is unsatisfiable within cur_k_ yet satisfiable, so its
            // minimal model is strictly longer: deepening always advances.
            assert(len > cur_k_ && static_cast<std::uint64_t>(len) <= cap_);
            if (len <= cur_k_ || len > std::numeric_limits<unsigned>::max()) {
                fail(RunOutcome::Resource, "deepening target out of range");
                return StepAction::Stop;
            }
            MucEvent dp;
            dp.type = MucEvent::Type::Deepen;
            dp.from_k = cur_k_;
            dp.to_k = static_cast<unsigned>(len);
            dp.witness_of = m;
            if (!emit(std::move(dp))) return StepAction::Stop;
            next_k_ = static_cast<unsigned>(len);
            return StepAction::Deepen;
        }
        case SatOutcome::Kind::BudgetExceeded:
            fail(RunOutcome::Resource, "oracle state budget exceeded");
            return StepAction::Stop;
        case SatOutcome::Kind::Interrupted:
        default:
            fail(RunOutcome::Timeout, "wall-clock timeout");
            return StepAction::Stop;
        }
    }

    StepAction run_pass() {
        std::unique_ptr<Probe> probe;
        std::unique_ptr<MusEnumerator> en;
        {
            PhaseTimer pt(stats_.gen_ms);
            probe = std::make_unique<Probe>(spec_, cur_k_, opt_.probe_limits);
            probe->set_interrupt_flag(&interrupt_);
            en = std::make_unique<MusEnumerator>(*probe);
            en->set_interrupt_flag(&interrupt_);
            for (const auto& [set, entry] : cache_)
                if (entry.certified) en->block_up(set);
        }
        for (;;) {
            MusEnumerator::Item item;
            {
                PhaseTimer pt(stats_.gen_ms);
                item = en->next();
            }
            if (item.kind == MusEnumerator::Item::Kind::Done)
                return StepAction::Finished;
            if (item.kind == MusEnumerator::Item::Kind::Error)
                return fail_generation(item.error);
            StepAction act = handle(std::move(item.mus));
            if (act != StepAction::Continue) return act;
        }
    }

    // Same observable event sequence as run_pass: one producer generates
    // the identical MUS stream while certification runs on this thread; a
    // restart cancels the producer and discards whatever it was ahead by,
    // exactly the items the sequential pass would never have pulled.
    StepAction run_pass_pipelined() {
        std::unique_ptr<Probe> probe;
        std::unique_ptr<MusEnumerator> en;
        {
            PhaseTimer pt(stats_.gen_ms);
            probe = std::make_unique<Probe>(spec_, cur_k_, opt_.probe_limits);
            probe->set_interrupt_flag(&interrupt_);
            en = std::make_unique<MusEnumerator>(*probe);
            en->set_interrupt_flag(&interrupt_);
            for (const auto& [set, entry] : cache_)
                if (entry.certified) en->block_up(set);
        }
        Channel chan;
        double producer_ms = 0.0;
        std::thread producer([&] {
            double t0 = thread_cpu_ms();
            for (;;) {
                MusEnumerator::Item item = en->next();
                bool terminal = item.kind != MusEnumerator::Item::Kind::Mus;
                if (!chan.push(std::move(item)) || terminal) break;
            }
            producer_ms = thread_cpu_ms() - t0;
            chan.close();
        });
        StepAction result = StepAction::Finished;
        for (;;) {
            std::optional<MusEnumerator::Item> item = chan.pop();
            if (!item) break;  // producer cancelled mid-stream
            if (item->kind == MusEnumerator::Item::Kind::Done) break;
            if (item->kind == MusEnumerator::Item::Kind::Error) {
                result = fail_generation(item->error);
                break;
            }
            StepAction act = handle(std::move(item->mus));
            if (act != StepAction::Continue) {
                result = act;
                break;
            }
        }
        chan.cancel();
        producer.join();
        stats_.gen_ms += producer_ms;
        return result;
    }

    void finish_stats() {
        stats_.final_k = cur_k_;
        stats_.n_mucs = sizes_.size();
        if (!sizes_.empty()) {
            std::sort(sizes_.begin(), sizes_.end());
            stats_.muc_size_min = sizes_.front();
            stats_.muc_size_max = sizes_.back();
            std::size_t h = sizes_.size() / 2;
            stats_.muc_size_med =
                sizes_.size() % 2 == 1
                    ? static_cast<double>(sizes_[h])
                    : (static_cast<double>(sizes_[h - 1]) + static_cast<double>(sizes_[h])) / 2.0;
        }
        stats_.wall_ms = wall_ms();
        MucEvent ev;
        ev.type = MucEvent::Type::Stats;
        ev.stats = stats_;
        emit(std::move(ev));
    }

    const ConjunctiveSpec& spec_;
    EngineOptions opt_;
    const EventSink& sink_;
    bool fixed_;
    unsigned cur_k_;
    unsigned next_k_ = 0;
    std::uint64_t cap_ = 0;
    std::map<SelectorSet, CacheEntry> cache_;
    std::vector<std::size_t> sizes_;
    RunStats stats_;
    std::atomic<bool> interrupt_{false};
    std::chrono::steady_clock::time_point t0_;
    bool sink_ok_ = true;
};

} // namespace

RunStats enumerate_mucs(const ConjunctiveSpec& spec, const EngineOptions& options,
                        const EventSink& sink) {
    Runner runner(spec, options, sink, /*fixed_depth=*/false, /*start_k=*/1);
    return runner.run();
}

RunStats enumerate_k_mucs(const ConjunctiveSpec& spec, unsigned k,
                          const EngineOptions& options, const EventSink& sink) {
    if (k == 0) throw std::invalid_argument("depth must be at least 1");
    Runner runner(spec, options, sink, /*fixed_depth=*/true, /*start_k=*/k);
    return runner.run();
}

std::optional<MucReport> find_one_muc(const ConjunctiveSpec& spec,
                                      const EngineOptions& options) {
    EngineOptions o = options;
    o.stop_after_first = true;
    std::optional<MucReport> found;
    enumerate_mucs(spec, o, [&found](const MucEvent& ev) {
        if (ev.type == MucEvent::Type::Muc && !found) found = ev.muc;
        return true;
    });
    return found;
}

} // namespace ltlfmuc
