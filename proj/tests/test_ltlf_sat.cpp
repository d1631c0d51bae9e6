#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ltlfmuc/ltlf_sat.hpp"
#include "oracles.hpp"

#include <atomic>
#include <random>
#include <vector>

using namespace ltlfmuc;

namespace {

FormulaId xpow(FormulaArena& a, FormulaId f, int n) {
    for (int i = 0; i < n; ++i) f = a.make_next(f);
    return f;
}

SatOutcome check(FormulaArena& a, std::vector<FormulaId> fs) {
    return check_satisfiability(a, fs);
}

} // namespace

TEST_CASE("reported length is the brute-force minimum") {
    std::mt19937_64 rng(211);
    int agreed_sat = 0, deep_or_unsat = 0;
    const std::size_t max_len = 5;
    for (int round = 0; round < 300; ++round) {
        FormulaArena a;
        std::vector<FormulaId> fs =
            oracles::random_spec_conjuncts(a, rng, 1 + rng() % 2, 2, 4);
        std::vector<AtomId> atoms = oracles::atoms_of(a, fs);
        std::optional<std::size_t> expect =
            oracles::min_model_length(a, fs, atoms, max_len);

        SatOutcome out = check(a, fs);
        REQUIRE((out.sat() || out.unsat()));
        if (expect) {
            ++agreed_sat;
            REQUIRE(out.sat());
            CHECK(out.length == *expect);
            REQUIRE(out.witness.has_value());
            CHECK(out.witness->length() == out.length);
            for (FormulaId f : fs) CHECK(evaluate(a, *out.witness, f, 0));
        } else {
            // no model within max_len: either truly unsat or longer
            ++deep_or_unsat;
            if (out.sat()) CHECK(out.length > max_len);
        }
        CHECK(out.states_explored <= out.state_cap);
    }
    CHECK(agreed_sat > 150);
    CHECK(deep_or_unsat > 20);
}

TEST_CASE("frozen minimal lengths and verdicts") {
    FormulaArena a;
    FormulaId pa = a.make_atom("a");
    FormulaId pb = a.make_atom("b");
    FormulaId beta = a.make_atom("beta");

    SatOutcome x5 = check(a, {xpow(a, beta, 5)});
    REQUIRE(x5.sat());
    CHECK(x5.length == 6);  // X^5 needs six positions

    SatOutcome pair = check(a, {xpow(a, beta, 5), xpow(a, a.make_not(beta), 5)});
    CHECK(pair.unsat());

    SatOutcome ab = check(a, {pa, a.make_next(pb)});
    REQUIRE(ab.sat());
    CHECK(ab.length == 2);

    CHECK(check(a, {a.make_and(pa, a.make_not(pa))}).unsat());
    CHECK(check(a, {a.make_and(a.make_globally(pa),
                               a.make_eventually(a.make_not(pa)))})
              .unsat());
    CHECK(check(a, {a.make_not(a.make_next(a.make_true())),
                    a.make_next(pb)})
              .unsat());

    SatOutcome fb = check(a, {a.make_eventually(pb)});
    REQUIRE(fb.sat());
    CHECK(fb.length == 1);

    SatOutcome ub = check(a, {a.make_until(pa, pb)});
    REQUIRE(ub.sat());
    CHECK(ub.length == 1);

    // a with G(a -> X a) forces a at every position, including the last
    // one where X a is false: unsatisfiable on finite traces
    CHECK(check(a, {pa, a.make_globally(a.make_implies(pa, a.make_next(pa)))})
              .unsat());
    // the weak-next variant is satisfiable by any all-a trace
    SatOutcome weak = check(
        a, {pa, a.make_globally(a.make_implies(pa, a.make_weak_next(pa)))});
    REQUIRE(weak.sat());
    CHECK(weak.length == 1);

    CHECK(check(a, {a.make_false()}).unsat());
    CHECK(check(a, {a.make_true()}).sat());

    CHECK_THROWS_AS(check_satisfiability(a, {}), std::invalid_argument);
}

TEST_CASE("budget and interrupt are distinct outcomes") {
    FormulaArena a;
    std::mt19937_64 rng(223);
    std::vector<FormulaId> fs = oracles::random_spec_conjuncts(a, rng, 3, 3, 4);

    LtlfLimits one;
    one.state_budget = 1;
    std::vector<FormulaId> deep{xpow(a, a.make_atom("a"), 3)};
    SatOutcome budget = check_satisfiability(a, deep, one);
    CHECK(budget.kind == SatOutcome::Kind::BudgetExceeded);

    std::atomic<bool> stop{true};
    SatOutcome intr = check_satisfiability(a, fs, {}, &stop);
    CHECK(intr.kind == SatOutcome::Kind::Interrupted);
    stop.store(false);
    SatOutcome fine = check_satisfiability(a, fs, {}, &stop);
    CHECK((fine.sat() || fine.unsat()));
}

TEST_CASE("progression agrees with evaluate along whole traces") {
    std::mt19937_64 rng(227);
    int accepted = 0, rejected = 0;
    for (int round = 0; round < 400; ++round) {
        FormulaArena a;
        FormulaId f = oracles::random_formula(a, rng, 2, 3);
        std::vector<FormulaId> fs{f};
        std::vector<AtomId> atoms = oracles::atoms_of(a, fs);
        std::size_t len = 1 + rng() % 4;
        Trace tr = oracles::random_trace(rng, atoms, len);

        ObligationState state = ObligationState::initial(a, fs);
        ProgressKind got = ProgressKind::Continue;
        for (std::size_t t = 0; t < len && got == ProgressKind::Continue; ++t) {
            std::vector<AtomId> sigma;
            for (AtomId at : atoms)
                if (tr.test(t, at)) sigma.push_back(at);
            ProgressResult r = progress(a, state, sigma, t + 1 == len);
            got = r.kind;
            if (got == ProgressKind::Continue) state = r.next;
        }
        bool expect = evaluate(a, tr, f, 0);
        // an early Reject must mean every completion fails, in particular
        // this one; at the end Accept must coincide exactly
        if (got == ProgressKind::Accept) {
            ++accepted;
            CHECK(expect);
        } else {
            ++rejected;
            CHECK_FALSE(expect);
        }
    }
    CHECK(accepted > 100);
    CHECK(rejected > 100);
}

TEST_CASE("progression basics") {
    FormulaArena a;
    FormulaId pa = a.make_atom("a");
    AtomId aa = a.find_atom("a");
    std::vector<FormulaId> fs{a.make_globally(pa)};

    ObligationState s0 = ObligationState::initial(a, fs);
    CHECK_FALSE(s0.dead());

    // G a progresses to itself while a holds
    std::vector<AtomId> with_a{aa};
    ProgressResult r1 = progress(a, s0, with_a, false);
    REQUIRE(r1.kind == ProgressKind::Continue);
    ProgressResult r2 = progress(a, r1.next, with_a, false);
    REQUIRE(r2.kind == ProgressKind::Continue);
    CHECK(r1.next == r2.next);  // fixed point, determinized states compare equal

    // failing a rejects immediately
    CHECK(progress(a, s0, {}, false).kind == ProgressKind::Reject);
    CHECK(progress(a, s0, {}, true).kind == ProgressKind::Reject);
    CHECK(progress(a, s0, with_a, true).kind == ProgressKind::Accept);

    // constant false is dead from the start
    std::vector<FormulaId> fbot{a.make_false()};
    ObligationState dead = ObligationState::initial(a, fbot);
    CHECK(dead.dead());
    CHECK(progress(a, dead, with_a, false).kind == ProgressKind::Reject);

    // discharged obligations accept any finale
    std::vector<FormulaId> ftop{a.make_true()};
    ObligationState top = ObligationState::initial(a, ftop);
    CHECK_FALSE(top.dead());
    CHECK(progress(a, top, {}, true).kind == ProgressKind::Accept);

    CHECK_THROWS_AS(progress(a, s0, std::vector<AtomId>{999}, false),
                    std::out_of_range);
}
