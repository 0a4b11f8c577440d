#include "doctest.h"
#include "support.hpp"

using namespace cafe;

TEST_CASE("lexer splits reserved characters and keeps operator words") {
  auto w = lexWords("eq (s X) + Y = s(X + Y) .");
  std::vector<std::string> want{"eq", "(", "s", "X", ")", "+", "Y", "=", "s", "(", "X", "+", "Y", ")", "."};
  CHECK(w == want);
  CHECK(lexWords("S =(*,1)=>+ SS") == std::vector<std::string>{"S", "=", "(", "*", ",", "1", ")", "=>+", "SS"});
  CHECK(lexWords("X:Nat.") == std::vector<std::string>{"X:Nat", "."});
  CHECK(lexWords("a.b .") == std::vector<std::string>{"a.b", "."});
  CHECK(lexWords("red a .\n") == std::vector<std::string>{"red", "a", "."});
}

TEST_CASE("lexer drops comments and collects expect directives") {
  auto r = lex("-- a comment\n--> expect: s 0\nred x .\n--> expect-block:\n--> one\n-->  two\n--> end-expect\nshow .\n");
  CHECK(r.tokens.size() == 5);
  REQUIRE(r.directives.size() == 5);
  CHECK(r.directives[0].kind == Directive::Expect);
  CHECK(r.directives[0].text == "s 0");
  CHECK(r.directives[1].kind == Directive::BlockBegin);
  CHECK(r.directives[2].text == "one");
  CHECK(r.directives[3].text == "two");
  CHECK(r.directives[4].kind == Directive::BlockEnd);
  CHECK(r.tokens[0].line == 3);
}

TEST_CASE("label colon is a token of its own") {
  auto w = lexWords("tr[wt]: a => b .");
  CHECK(w == std::vector<std::string>{"tr", "[", "wt", "]", ":", "a", "=>", "b", "."});
}

namespace {
const char* kArith = R"(mod! AR { [N]
ops 0 1 : -> N .
op _+_ : N N -> N {prec: 33} .
op _*_ : N N -> N {prec: 31} .
op -_ : N -> N .
op f : N N -> N .
op if_then_else_fi : Bool N N -> N . })";
}

TEST_CASE("mixfix parser honours precedence and prints canonically") {
  tst::Env e;
  REQUIRE(e.run(kArith));
  auto m = e.mod("AR");
  CHECK(printTerm(tst::parseIn(*m, "0 + 1 * 1")) == "(0 + (1 * 1))");
  CHECK(printTerm(tst::parseIn(*m, "(0 + 1) * 1")) == "((0 + 1) * 1)");
  CHECK(printTerm(tst::parseIn(*m, "f(0, - 1)")) == "f(0,- 1)");
  CHECK(printTerm(tst::parseIn(*m, "if true then 0 else 1 fi")) == "if true then 0 else 1 fi");
  CHECK(printTerm(tst::parseIn(*m, "0 + 1"), false) == "0 + 1");
}

TEST_CASE("parser reports errors for junk and unknown names") {
  tst::Env e;
  REQUIRE(e.run(kArith));
  auto m = e.mod("AR");
  CHECK_THROWS_AS(tst::parseIn(*m, "0 +"), ParseError);
  CHECK_THROWS_AS(tst::parseIn(*m, "zork"), ParseError);
  CHECK_THROWS_AS(tst::parseIn(*m, "f(0)"), ParseError);
}

TEST_CASE("inline variables carry their sort") {
  tst::Env e;
  REQUIRE(e.run(kArith));
  auto m = e.mod("AR");
  auto t = tst::parseIn(*m, "X:N + 0");
  REQUIRE(t->args.size() == 2);
  bool sawVar = false;
  for (auto& a : t->args)
    if (a->isVar()) sawVar = sortName(a->sort) == "N";
  CHECK(sawVar);
}

TEST_CASE("command parser: unknown commands and incomplete input") {
  tst::Env e;
  CHECK_FALSE(e.run("frobnicate now ."));
  CHECK(e.s.errors == 1);
  std::string buf = "mod! M { [S]\nop a : -> S .";
  e.s.feed(buf);
  CHECK_FALSE(buf.empty());   // still waiting for the closing brace
  buf += " }\nred in M : a .\n";
  e.s.feed(buf);
  CHECK(buf.empty());
  CHECK(e.out.str().find("\na\n") != std::string::npos);
}

TEST_CASE("expect directives are checked against the following command") {
  cafe::Options o;
  o.check = true;
  tst::Env e(o);
  e.run("mod! M { [S] op a : -> S . }\n--> expect: a\nred a .\n--> expect: b\nred a .\n");
  CHECK(e.s.expectPasses == 1);
  CHECK(e.s.expectFailures == 1);
  CHECK(e.s.exitCode() == 1);
}
