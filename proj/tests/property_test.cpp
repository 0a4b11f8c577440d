#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace cafe;

namespace {

const char* kAC = R"(mod! ACP { [E < S]
ops a b c : -> E .
op g : E -> E .
op _+_ : S S -> S {assoc comm} . })";

// pattern items; U V range over single elements, X Y over nonempty sums
const std::vector<std::string> kPatItems{"a", "b", "c", "g(a)", "g(U)", "U", "V", "X", "Y"};
const std::vector<std::string> kSubjItems{"a", "b", "c", "g(a)", "g(b)"};

using Bag = std::vector<std::string>;   // sorted
using Binding = std::map<std::string, Bag>;

std::string key(const Binding& b) {
  std::string k;
  for (auto& [v, bag] : b) {
    k += v + "=";
    for (auto& x : bag) k += x + ",";
    k += ";";
  }
  return k;
}

bool bindTo(Binding& b, const std::string& v, const Bag& val) {
  auto it = b.find(v);
  if (it == b.end()) {
    b[v] = val;
    return true;
  }
  return it->second == val;
}

// all matchers by assigning every subject element to a pattern position
std::set<std::string> bruteForce(const std::vector<std::string>& pat, const std::vector<std::string>& subj) {
  std::set<std::string> out;
  size_t P = pat.size(), N = subj.size();
  std::vector<size_t> asg(N, 0);
  for (;;) {
    std::vector<Bag> parts(P);
    for (size_t i = 0; i < N; ++i) parts[asg[i]].push_back(subj[i]);
    bool ok = true;
    Binding b;
    for (size_t p = 0; p < P && ok; ++p) {
      Bag& part = parts[p];
      std::sort(part.begin(), part.end());
      const std::string& it = pat[p];
      if (part.empty()) ok = false;
      else if (it == "X" || it == "Y") ok = bindTo(b, it, part);
      else if (part.size() != 1) ok = false;
      else if (it == "U" || it == "V") ok = bindTo(b, it, part);
      else if (it == "g(U)") {
        const std::string& el = part[0];
        ok = el.rfind("g(", 0) == 0 && bindTo(b, "U", {el.substr(2, el.size() - 3)});
      } else {
        ok = part[0] == it;
      }
    }
    if (ok) out.insert(key(b));
    size_t i = 0;
    while (i < N && ++asg[i] == P) asg[i++] = 0;
    if (i == N) break;
  }
  return out;
}

std::string withSorts(const std::string& item) {
  if (item == "U" || item == "V") return item + ":E";
  if (item == "X" || item == "Y") return item + ":S";
  if (item == "g(U)") return "g(U:E)";
  return item;
}

std::string joinPlus(const std::vector<std::string>& xs, bool sorts) {
  std::string s;
  for (auto& x : xs) s += (s.empty() ? "" : " + ") + (sorts ? withSorts(x) : x);
  return s;
}

}  // namespace

TEST_CASE("property: AC matching agrees with brute force on random pairs") {
  tst::Env e;
  REQUIRE(e.run(kAC));
  auto m = e.mod("ACP");
  const TermP plusTop = tst::parseIn(*m, "a + b");
  std::mt19937 rng(20240611);
  int withMatches = 0, pairs = 1000;
  for (int n = 0; n < pairs; ++n) {
    std::vector<std::string> pat, subj;
    size_t np = 2 + rng() % 4, ns = 2 + rng() % 4;
    for (size_t i = 0; i < np; ++i) pat.push_back(kPatItems[rng() % kPatItems.size()]);
    for (size_t i = 0; i < ns; ++i) subj.push_back(kSubjItems[rng() % kSubjItems.size()]);
    TermP pt = tst::parseIn(*m, joinPlus(pat, true));
    TermP st = tst::parseIn(*m, joinPlus(subj, false));
    std::set<std::string> got;
    Matcher mt(*m);
    Subst s;
    bool sound = true;
    mt.match(pt, st, s, [&] {
      sound = sound && equalAC(applySubst(*m, pt, s), st);
      Binding b;
      for (auto& [v, val] : s.binds) {
        Bag bag;
        if (!val->isVar() && val->op == plusTop->op)
          for (auto& x : val->args) bag.push_back(printTerm(x));
        else
          bag.push_back(printTerm(val));
        std::sort(bag.begin(), bag.end());
        b[v->name] = bag;
      }
      got.insert(key(b));
      return false;
    });
    auto want = bruteForce(pat, subj);
    INFO("pattern: " << joinPlus(pat, true) << "  subject: " << joinPlus(subj, false));
    CHECK(sound);
    CHECK(got == want);
    withMatches += !want.empty();
  }
  // the generator must not be trivially unmatched
  CHECK(withMatches > pairs / 10);
}

namespace {

// every goal sentence side of every proof seen while running a chain
struct GoalTerms {
  std::vector<std::pair<ModuleP, TermP>> terms;
  std::set<std::string> seen;
  void collect(Session& s) {
    auto* pt = s.proof();
    if (!pt) return;
    for (size_t g = 0; g < pt->goals.size(); ++g)
      for (auto& r : pt->goals[g].stp)
        for (auto& t : {r.lhs, r.rhs}) {
          auto k = std::to_string(g) + "@" + pt->goals[g].name + "/" + fingerprint(t) + "/" + pt->goals[0].ctm->name;
          if (seen.insert(k).second) terms.emplace_back(pt->context((int)g), t);
        }
  }
};

const std::vector<std::vector<std::string>> kChains{
    {"list-append"},
    {"qlock-ots"},
    {"qlock-ots", "tsp-spec", "tsp-mx"},
    {"qlock-ots", "tsp-spec", "tsp-mx", "tsp-newex"},
    {"qlock-ots", "tsp-spec", "tsp-mx", "tsp-wc"},
};

}  // namespace

TEST_CASE("property: reduction is idempotent and its trace replays on corpus goal terms") {
  size_t checked = 0;
  for (auto& chain : kChains) {
    tst::Env e;
    GoalTerms gt;
    e.s.afterCommand = [&](Session& s) { gt.collect(s); };
    for (auto& f : chain) REQUIRE(e.run(tst::corpus(f)));
    for (auto& [m, t] : gt.terms) {
      Reducer r(m);
      Trace tr;
      TermP once = r.reduceTraced(t, tr);
      Reducer r2(m);
      TermP twice = r2.reduce(once);
      INFO("term: " << printTerm(t));
      CHECK(equalAC(once, twice));
      std::string why;
      CHECK_MESSAGE(r.replay(tr, &why), why);
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("property: a condition that calls itself exceeds the nesting budget") {
  tst::Env e;
  e.run(tst::corpus("nonterm"));
  CHECK(e.s.lastArtifacts == std::vector<std::string>{"error: BudgetExceeded(nesting)"});
  for (int depth : {8, 64, 300}) {
    Budget b;
    b.maxNesting = depth;
    Reducer r(e.mod("LOOP"), b);
    std::string kind;
    try {
      r.reduce(tst::parseIn(*e.mod("LOOP"), "b"));
    } catch (const BudgetExceeded& x) {
      kind = x.kind;
    }
    CHECK(kind == "nesting");
  }
}

TEST_CASE("property: one next target and sound discharges after every command") {
  std::vector<std::vector<std::string>> chains = kChains;
  chains.push_back({"qlock-ots", "tsp-spec", "tsp-search"});
  for (auto& chain : chains) {
    Options o;
    o.invariants = true;
    tst::Env e(o);
    int commands = 0;
    e.s.afterCommand = [&](Session& s) {
      ++commands;
      if (!s.proof()) return;
      int ntg = 0;
      for (auto& g : s.proof()->goals) ntg += g.ntg;
      CHECK(ntg <= 1);
    };
    for (auto& f : chain) CHECK(e.run(tst::corpus(f)));
    INFO("chain starting " << chain.front() << " ending " << chain.back());
    CHECK(e.s.invariantFailures.empty());
    CHECK(e.s.errors == 0);
    CHECK(commands > 0);
  }
}
