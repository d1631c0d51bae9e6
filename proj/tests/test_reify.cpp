#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ltlfmuc/formula.hpp"
#include "ltlfmuc/reify.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

using namespace ltlfmuc;

namespace {

std::string strip_ws(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

// Facts and annotation only: first two blocks, comment lines dropped.
std::string fact_blocks(const std::string& exported) {
    std::string out;
    std::size_t pos = 0;
    int block = 0;
    while (pos < exported.size()) {
        std::size_t eol = exported.find('\n', pos);
        if (eol == std::string::npos) eol = exported.size();
        std::string line = exported.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) {
            ++block;
            if (block >= 2) break;
            continue;
        }
        if (line[0] == '%') continue;
        out += line;
        out += '\n';
    }
    return out;
}

} // namespace

TEST_CASE("published reification of (a & !b) & (c U b)") {
    FormulaArena a;
    FormulaId f = parse_formula(a, "(a & !b) & (c U b)");

    // ids 0..6 in processing order: root, both conjuncts, then depth first
    std::vector<SubformulaRow> rows = subformula_table(a, f);
    REQUIRE(rows.size() == 7);
    CHECK(rows[0].kind == NodeKind::And);
    CHECK(rows[0].children == std::vector<ReifyId>{1, 2});
    CHECK(rows[1].kind == NodeKind::And);
    CHECK(rows[1].children == std::vector<ReifyId>{3, 4});
    CHECK(rows[2].kind == NodeKind::Until);
    CHECK(rows[2].children == std::vector<ReifyId>{6, 5});
    CHECK(rows[3].kind == NodeKind::Atom);
    CHECK(a.atom_name(rows[3].atom) == "a");
    CHECK(rows[4].kind == NodeKind::Not);
    CHECK(rows[4].children == std::vector<ReifyId>{5});
    CHECK(rows[5].kind == NodeKind::Atom);
    CHECK(a.atom_name(rows[5].atom) == "b");
    CHECK(rows[6].kind == NodeKind::Atom);
    CHECK(a.atom_name(rows[6].atom) == "c");

    // a spec over the root split gets the same numbering via a virtual root
    ConjunctiveSpec spec(a, split_root(a, f));
    Reification r = reify_spec(a, spec.conjuncts());
    CHECK(r.has_virtual_root());
    REQUIRE(r.rows().size() == 7);
    CHECK(r.rows()[0].formula == kInvalidFormula);
    CHECK(r.id_of(spec.conjunct(1)) == 1);
    CHECK(r.id_of(spec.conjunct(2)) == 2);
    CHECK(r.visit_order() == std::vector<ReifyId>{0, 1, 3, 4, 5, 2, 6});
    CHECK_THROWS_AS(r.id_of(a.make_atom("zz")), std::out_of_range);
}

TEST_CASE("export matches the published listing modulo whitespace") {
    FormulaArena a;
    FormulaId f = parse_formula(a, "(a & !b) & (c U b)");
    ConjunctiveSpec spec(a, split_root(a, f));
    std::string exported = export_asp_facts(spec, 3);

    // published probe listing, with phi carrying the subformula id
    const std::string published =
        "conjunction(1, 3).  conjunction(1, 4).\n"
        "atom(3, a).  negate(4, 5).  atom(5, b).  \n"
        "until(2, 6, 5).  atom(6, c).\n"
        "root(0).\n"
        "\n"
        "conjunction(0,1) :- phi(1). {phi(1)}.\n"
        "conjunction(0,2) :- phi(2). {phi(2)}.\n";
    CHECK(strip_ws(fact_blocks(exported)) == strip_ws(published));

    // frozen layout of the fact and annotation blocks
    const std::string expected_head =
        "% formula facts\n"
        "conjunction(1, 3).\n"
        "conjunction(1, 4).\n"
        "atom(3, a).\n"
        "negate(4, 5).\n"
        "atom(5, b).\n"
        "until(2, 6, 5).\n"
        "atom(6, c).\n"
        "root(0).\n"
        "\n"
        "% probe annotation\n"
        "conjunction(0,1) :- phi(1). {phi(1)}.\n"
        "conjunction(0,2) :- phi(2). {phi(2)}.\n";
    CHECK(exported.substr(0, expected_head.size()) == expected_head);

    // depth parameter lands in the preamble
    CHECK(exported.find("#const k=3.\n") != std::string::npos);
    CHECK(exported.find("time(0..k-1).\n") != std::string::npos);
    CHECK(exported.find("{ trace(T,A): atom(_,A) } :- time(T).\n") != std::string::npos);
    CHECK(exported.find(":- root(X), not holds(X,0).\n") != std::string::npos);
    std::string at9 = export_asp_facts(spec, 9);
    CHECK(at9.find("#const k=9.\n") != std::string::npos);

    // semantics rules present for every reified predicate
    for (const char* needle :
         {"holds(T,X) :- trace(T,A), atom(X,A).", "until(X,LHS,RHS)",
          "conjunction(X,_)", "negate(X,F)", "disjunction(X,F)",
          "release(X,LHS,RHS)", "true(X)"})
        CHECK(exported.find(needle) != std::string::npos);
}

TEST_CASE("single conjunct annotation uses the subformula id") {
    FormulaArena a;
    std::vector<FormulaId> cs{parse_formula(a, "a")};
    ConjunctiveSpec spec(a, cs);
    std::string exported = export_asp_facts(spec, 1);
    const std::string expected =
        "atom(1, a).\n"
        "root(0).\n"
        "conjunction(0,1) :- phi(1). {phi(1)}.\n";
    CHECK(strip_ws(fact_blocks(exported)) == strip_ws(expected));
}

TEST_CASE("duplicate children collapse to set semantics") {
    FormulaArena a;
    FormulaId pa = a.make_atom("a");
    FormulaId pb = a.make_atom("b");

    // duplicate conjuncts share an id and one annotation rule
    ConjunctiveSpec dup(a, {pa, pb, pa});
    std::string exported = export_asp_facts(dup, 2);
    CHECK(exported.find("conjunction(0,1) :- phi(1). {phi(1)}.") != std::string::npos);
    CHECK(exported.find("conjunction(0,2) :- phi(2). {phi(2)}.") != std::string::npos);
    CHECK(exported.find("phi(3)") == std::string::npos);

    // duplicate children of one conjunction yield one fact
    ConjunctiveSpec both(a, {a.make_and(pa, pa)});
    std::string facts = fact_blocks(export_asp_facts(both, 1));
    CHECK(facts.find("conjunction(1, 2).") != std::string::npos);
    CHECK(facts.find("conjunction(1, 2).\nconjunction(1, 2).") == std::string::npos);
}

TEST_CASE("shared subformulas keep one id across conjuncts") {
    FormulaArena a;
    FormulaId pa = a.make_atom("a");
    FormulaId pb = a.make_atom("b");
    ConjunctiveSpec spec(a, {a.make_and(pa, pb), pb});
    Reification r = reify_spec(a, spec.conjuncts());
    REQUIRE(r.rows().size() == 4);
    CHECK(r.id_of(pb) == 2);          // numbered as the second conjunct
    CHECK(r.id_of(pa) == 3);
    CHECK(r.visit_order() == std::vector<ReifyId>{0, 1, 3, 2});
    std::string facts = fact_blocks(export_asp_facts(spec, 1));
    const std::string expected =
        "conjunction(1, 3).\n"
        "conjunction(1, 2).\n"
        "atom(3, a).\n"
        "atom(2, b).\n"
        "root(0).\n"
        "conjunction(0,1) :- phi(1). {phi(1)}.\n"
        "conjunction(0,2) :- phi(2). {phi(2)}.\n";
    CHECK(strip_ws(facts) == strip_ws(expected));
}

TEST_CASE("sugar is desugared before export and true is reified") {
    FormulaArena a;
    std::vector<FormulaId> cs{a.make_eventually(a.make_atom("a"))};
    ConjunctiveSpec spec(a, cs);
    std::string facts = fact_blocks(export_asp_facts(spec, 2));
    // F a reifies as true U a
    const std::string expected =
        "until(1, 2, 3).\n"
        "true(2).\n"
        "atom(3, a).\n"
        "root(0).\n"
        "conjunction(0,1) :- phi(1). {phi(1)}.\n";
    CHECK(strip_ws(facts) == strip_ws(expected));
}
