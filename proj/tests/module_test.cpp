#include "doctest.h"
#include "support.hpp"

using namespace cafe;

namespace {
const char* kMods = R"(mod! PNAT { [Nat]
op 0 : -> Nat {constr} .
op s_ : Nat -> Nat {constr} .
op _+_ : Nat Nat -> Nat .
vars X Y : Nat .
eq 0 + Y = Y .
eq (s X) + Y = s(X + Y) . }

mod* TH2 { [Elt2] }

mod! PAIR (X :: TRIV, Y :: TH2) { [Pair]
op <_,_> : Elt Elt2 -> Pair {constr} .
op fst : Pair -> Elt .
eq fst(< A:Elt, B:Elt2 >) = A . }

mod! TWICE (X :: TRIV) {
op tw : Elt -> Elt .
eq tw(E:Elt) = E . }
)";
}

TEST_CASE("builtin modules exist and cannot be redefined") {
  tst::Env e;
  for (auto n : {"BOOL", "TRIV", "NAT", "RWL"}) CHECK(e.s.registry.has(n));
  CHECK_FALSE(e.run("mod! BOOL { [X] }"));
}

TEST_CASE("BOOL reduces propositional terms") {
  tst::Env e;
  e.run("mod! M { [S] ops a b : -> S . op p : -> Bool . }");
  CHECK(e.last("red true and false .") == "false");
  CHECK(e.last("red not (true or false) .") == "false");
  CHECK(e.last("red p and (not p) .") == "false");
  CHECK(e.last("red p implies p .") == "true");
  CHECK(e.last("red a = a .") == "true");
  CHECK(e.last("red a == b .") == "false");
  CHECK(e.last("red if true then a else b fi .") == "a");
}

TEST_CASE("NAT literals compare") {
  tst::Env e;
  CHECK(e.last("red in NAT : 3 == 3 .") == "true");
  CHECK(e.last("red in NAT : 3 == 4 .") == "false");
}

TEST_CASE("instantiation by views and by default principal sorts") {
  tst::Env e;
  REQUIRE(e.run(kMods));
  CHECK(e.last("red in PAIR(PNAT, NAT) : fst(< s 0, 3 >) .") == "s 0");
  CHECK(e.last("red in PAIR(PNAT{sort Elt -> Nat}, NAT{sort Elt2 -> Nat}) : fst(< 0 + s 0, 3 >) .") == "s 0");
  CHECK(e.last("red in TWICE(PNAT) : tw(s 0 + 0) .") == "s 0");
}

TEST_CASE("sum and renaming") {
  tst::Env e;
  REQUIRE(e.run(kMods));
  // both summands name their sort Nat, so the literal is a Peano number too
  CHECK(e.last("red in PNAT + TWICE(NAT) : (s 0) + tw(2) .") == "s 2");
  CHECK(e.last("parse in PNAT * {sort Nat -> Peano} : s 0 .") == "s 0 : Peano");
  CHECK(e.last("red in PNAT * {op _+_ -> _plus_} : (s 0) plus (s 0) .") == "s(s 0)");
}

TEST_CASE("open adds constants and equations, close drops them") {
  tst::Env e;
  REQUIRE(e.run(kMods));
  e.run("open PNAT .\nop n@ : -> Nat .\neq n@ = s 0 .");
  CHECK(e.last("red n@ + n@ .") == "s(s 0)");
  e.run("close");
  CHECK(e.last("red in PNAT : 0 + 0 .") == "0");
  CHECK_FALSE(e.run("red in PNAT : n@ ."));
}

TEST_CASE("flattening keeps imported equations once") {
  tst::Env e;
  REQUIRE(e.run(kMods));
  e.run("mod! A { pr(PNAT) }\nmod! B { pr(PNAT) pr(A) }");
  auto b = e.mod("B");
  auto a = e.mod("PNAT");
  CHECK(b->eqs.size() == a->eqs.size());
}

TEST_CASE("unknown modules and sorts are hard errors") {
  tst::Env e;
  CHECK_FALSE(e.run("red in NOPE : 0 ."));
  tst::Env f;
  CHECK_FALSE(f.run("mod! M { op a : -> Missing . }\nred in M : a ."));
}
