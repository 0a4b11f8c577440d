#include "doctest.h"
#include "support.hpp"

using namespace cafe;

namespace {
const char* kCounter = R"(mod! CNT { [St]
ops s0 s1 s2 s3 : -> St .
trans[go]: s0 => s1 .
trans[back]: s1 => s0 .
trans[up]: s1 => s2 .
ctrans[never]: s2 => s3 if false . }
select CNT .
)";
}

TEST_CASE("one step search") {
  tst::Env e;
  REQUIRE(e.run(kCounter));
  CHECK(e.last("red s0 =(1,1)=>+ S:St .") == "true");
  CHECK(e.last("red s2 =(1,1)=>+ S:St .") == "false");
}

TEST_CASE("reachability visits each state once") {
  tst::Env e;
  REQUIRE(e.run(kCounter));
  CHECK(e.last("red s0 =(*,*)=>* S:St suchThat (S = s2) .") == "true");
  CHECK(e.s.lastVisited == 3);
  CHECK(e.last("red s0 =(*,*)=>* S:St suchThat (S = s3) .") == "false");
  CHECK(e.s.lastVisited == 3);
}

TEST_CASE("state budget") {
  Options o;
  o.budget.maxStates = 2;
  tst::Env e(o);
  REQUIRE(e.run(kCounter));
  e.run("red s0 =(*,*)=>* S:St suchThat (S = s3) .");
  CHECK(e.s.lastError == "BudgetExceeded(states)");
}

TEST_CASE("step search with conditions and info printouts") {
  tst::Env e;
  REQUIRE(e.run(kCounter));
  e.run("mod! CNTi { pr(CNT) op i : St St Bool -> Info . }");
  e.run("red in CNTi : s1 =(*,1)=>+ SS:St if CC:Bool suchThat true {i(s1,SS,CC)} .");
  std::vector<std::string> want{"i(s1,s0,true) [back]", "i(s1,s2,true) [up]", "true"};
  CHECK(e.s.lastArtifacts == want);
  e.run("red in CNTi : s2 =(*,1)=>+ SS:St if CC:Bool suchThat true {i(s2,SS,CC)} .");
  std::vector<std::string> want2{"i(s2,s3,false) [never]", "true"};
  CHECK(e.s.lastArtifacts == want2);
}

TEST_CASE("queue lock state counts for two and three agents") {
  tst::Env e;
  REQUIRE(e.run(tst::corpus("qlock-ots")));
  REQUIRE(e.run(tst::corpus("tsp-spec")));
  REQUIRE(e.run(R"(open (QLOCK/TSP + MXprp)(NAT{sort Aid -> Nat, op A1:Aid = A2:Aid -> A1:Nat == A2:Nat}) .)"));
  CHECK(e.last("red [nilQ r 1 2 w empS c empS] =(*,*)=>* S:State suchThat (not (mx S)) .") == "false");
  CHECK(e.s.lastVisited == 9);
  CHECK(e.last("red [nilQ r 1 2 3 w empS c empS] =(*,*)=>* S:State suchThat (not (mx S)) .") == "false");
  CHECK(e.s.lastVisited == 31);
}
