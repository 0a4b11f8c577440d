#include "doctest.h"
#include "support.hpp"

using namespace cafe;

TEST_CASE("sort poset: closure, lub and components") {
  tst::Env e;
  e.run("mod! P { [A < B < C] [D < C] [E] }");
  auto m = e.mod("P");
  SortId A = internSort("A"), B = internSort("B"), C = internSort("C"), D = internSort("D"), E = internSort("E");
  CHECK(m->leq(A, C));
  CHECK(m->leq(A, A));
  CHECK_FALSE(m->leq(C, A));
  CHECK_FALSE(m->leq(A, D));
  CHECK(m->lub(A, D) == C);
  CHECK(m->sameComponent(A, D));
  CHECK_FALSE(m->sameComponent(A, E));
}

TEST_CASE("subsort cycles are rejected") {
  tst::Env e;
  e.run("mod! CYC { [A < B] [B < A] }\nred in CYC : true .");
  CHECK(e.s.errors > 0);
}

TEST_CASE("sensible and regular checks on the overloaded constant signatures") {
  tst::Env e;
  REQUIRE(e.run(tst::corpus("signatures")));
  auto r1 = e.mod("SIG1")->checkSignature();
  auto r2 = e.mod("SIG2")->checkSignature();
  auto r3 = e.mod("SIG3")->checkSignature();
  CHECK_FALSE(r1.sensible);
  CHECK(r2.sensible);
  CHECK_FALSE(r2.regular);
  CHECK(r3.sensible);
  CHECK(r3.regular);
  CHECK(e.last("parse in SIG3 : 2 .") == "2 : EvenNat");
}

TEST_CASE("least sort of applications follows the argument sorts") {
  tst::Env e;
  REQUIRE(e.run(tst::corpus("pnat")));
  auto m = e.mod("PNAT+");
  CHECK(sortName(tst::parseIn(*m, "0")->sort) == "Zero");
  CHECK(sortName(tst::parseIn(*m, "s 0")->sort) == "NzNat");
  CHECK(sortName(tst::parseIn(*m, "0 + s 0")->sort) == "Nat");
  CHECK(e.last("parse in PNAT+ : s s 0 .") == "s(s 0) : NzNat");
}

TEST_CASE("overloaded operator resolves to the least rank") {
  tst::Env e;
  e.run(R"(mod! OV { [Nat < Int]
op 1 : -> Nat .
op -_ : Int -> Int .
op _+_ : Int Int -> Int .
op _+_ : Nat Nat -> Nat . })");
  auto m = e.mod("OV");
  CHECK(sortName(tst::parseIn(*m, "1 + 1")->sort) == "Nat");
  CHECK(sortName(tst::parseIn(*m, "1 + (- 1)")->sort) == "Int");
}

TEST_CASE("substitution instantiates variables and recomputes sorts") {
  tst::Env e;
  REQUIRE(e.run(tst::corpus("pnat")));
  auto m = e.mod("PNAT+");
  TermP pat = tst::parseIn(*m, "X:Nat + s Y:Nat");
  Subst s;
  s.bind(mkVar("X", internSort("Nat")), tst::parseIn(*m, "s 0"));
  s.bind(mkVar("Y", internSort("Nat")), tst::parseIn(*m, "0"));
  TermP t = applySubst(*m, pat, s);
  CHECK(printTerm(t) == "((s 0) + (s 0))");
  CHECK(t->ground);
  // an unbound variable stays
  Subst part;
  part.bind(mkVar("X", internSort("Nat")), tst::parseIn(*m, "0"));
  TermP u = applySubst(*m, pat, part);
  CHECK_FALSE(u->ground);
  std::vector<TermP> vs;
  collectVars(u, vs);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0]->name == "Y");
}

TEST_CASE("comm and AC terms compare modulo argument order") {
  tst::Env e;
  e.run(R"(mod! ACM { [E]
ops a b c : -> E .
op _+_ : E E -> E {assoc comm} .
op f : E E -> E {comm} . })");
  auto m = e.mod("ACM");
  CHECK(equalAC(tst::parseIn(*m, "a + (b + c)"), tst::parseIn(*m, "(c + a) + b")));
  CHECK(equalAC(tst::parseIn(*m, "f(a,b)"), tst::parseIn(*m, "f(b,a)")));
  CHECK_FALSE(equalAC(tst::parseIn(*m, "a + a + b"), tst::parseIn(*m, "a + b + b")));
  CHECK(tst::parseIn(*m, "a + (b + c)")->args.size() == 3);
}
