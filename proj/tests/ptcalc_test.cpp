#include "doctest.h"
#include "support.hpp"

using namespace cafe;

namespace {
const char* kCase = R"(mod! CASE { [S]
ops a b : -> S .
op p : -> Bool .
op f : Bool -> S .
eq f(true) = a .
eq f(false) = a . }
select CASE .
)";
}

TEST_CASE("goal, ctf split and discharge") {
  tst::Env e;
  REQUIRE(e.run(kCase));
  e.run(":goal{eq f(p) = a .}");
  REQUIRE(e.s.proof());
  CHECK(e.last(":show proof") == ">root");
  CHECK(e.last(":red f(p) .") == "f(p)");
  e.run(":def p = :ctf{eq p = true .}");
  CHECK(e.last(":apply(p)") == "next target: 1");
  CHECK(e.last(":red f(p) .") == "a");
  CHECK(e.last(":apply(rd-)") == "next target: 2");
  CHECK(e.last(":apply(rd-)") == "all goals discharged");
  e.run(":show proof");
  std::vector<std::string> want{"root*", "[p]   1*", "[p]   2*"};
  CHECK(e.s.lastArtifacts == want);
  CHECK(e.s.proof()->proved());
}

TEST_CASE("ctf on a Bool equation builds the complementary constant") {
  tst::Env e;
  REQUIRE(e.run(kCase));
  e.run(":goal{eq f(p) = a .}\n:def p = :ctf{eq p = true .}\n:apply(p)");
  auto d = e.s.proof()->describe(2);
  bool saw = false;
  for (auto& l : d) saw = saw || l == "  assumed: eq p = false .";
  CHECK(saw);
}

TEST_CASE("csp children and select") {
  tst::Env e;
  REQUIRE(e.run(kCase));
  e.run(":goal{eq f(p) = a .}\n:def c = :csp{eq p = true . eq p = false .}\n:apply(c)");
  CHECK(e.s.proof()->goals.size() == 3);
  e.run(":select 2");
  CHECK(e.s.proof()->target() == e.s.proof()->find("2"));
  CHECK(e.last(":apply(rd-)") == "next target: 1");
  CHECK_FALSE(e.run(":select 9"));
}

TEST_CASE("a failing rd- keeps the goal open") {
  tst::Env e;
  REQUIRE(e.run(kCase));
  e.run(":goal{eq f(p) = b .}");
  CHECK(e.last(":apply(rd-)") == "next target: root");
  CHECK_FALSE(e.s.proof()->proved());
  e.run(":show goal");
  bool red = false;
  for (auto& l : e.s.lastArtifacts) red = red || l.find("reduces to") != std::string::npos;
  CHECK(red);
}

TEST_CASE("init instantiates a labelled equation") {
  tst::Env e;
  REQUIRE(e.run(tst::corpus("list-append")));
  CHECK(e.s.errors == 0);
  REQUIRE(e.s.proof());
  CHECK(e.s.proof()->proved());
  CHECK(e.s.proof()->goals.size() == 4);
}

TEST_CASE("tree invariants hold through the list proofs") {
  Options o;
  o.invariants = true;
  tst::Env e(o);
  CHECK(e.run(tst::corpus("list-append")));
  CHECK(e.s.invariantFailures.empty());
}

TEST_CASE("invariant check spots a forged discharge") {
  tst::Env e;
  REQUIRE(e.run(kCase));
  e.run(":goal{eq f(p) = b .}");
  auto* pt = e.s.proof();
  std::string why;
  CHECK(pt->checkInvariants(&why));
  pt->goals[0].dcd = true;
  CHECK_FALSE(pt->checkInvariants(&why));
  pt->goals[0].dcd = false;
  pt->goals[0].ntg = true;
  pt->goals.push_back(pt->goals[0]);
  CHECK_FALSE(pt->checkInvariants(&why));
}

TEST_CASE("set adjusts budgets") {
  tst::Env e;
  e.run(":set(steps, 10)");
  CHECK(e.s.opts.budget.maxSteps == 10);
  CHECK_FALSE(e.run(":set(colour, red)"));
}
