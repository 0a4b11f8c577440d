#include <deque>

#include "cafe/rewrite.hpp"

namespace cafe {

namespace {

bool isTrue(const TermP& t) { return !t->isVar() && t->op == trueOp(); }

// bind a search pattern (variable or constructor term) against a state
bool bindPattern(Reducer& r, const TermP& pat, const TermP& state, Subst& s, const std::function<bool()>& k) {
  Matcher mt(r.module());
  return mt.match(pat, state, s, k);
}

}  // namespace

// S =(*,1)=>+ SS if CC suchThat P {I}: every one-step rewrite of S, conditions left unevaluated
static TermP stepSearch(Reducer& r, const TermP& t, const TermP& s0) {
  const Module& m = r.module();
  const TermP &ssVar = t->args[1], &ccVar = t->args[2], &pred = t->args[3], &info = t->args[4];
  bool found = false;
  std::vector<size_t> path;
  std::function<void(const TermP&)> visit = [&](const TermP& sub) {
    if (sub->isVar()) return;
    for (int idx : m.trsFor(sub->op)) {
      const Rule& rule = m.trs[idx];
      if (rule.nonexec) continue;
      Matcher mt(m);
      Subst th;
      mt.matchExt(rule.lhs, sub, th, [&] {
        TermP c = contractum(m, rule.lhs->op, r.inst(rule.rhs, th), mt);
        TermP ss = replaceAt(m, s0, path, 0, c);
        TermP cc = rule.cond ? r.inst(rule.cond, th) : m.boolConst(true);
        Subst sigma;
        bool ok = true;
        if (ssVar->isVar()) sigma.bind(ssVar, ss);
        if (ccVar->isVar()) sigma.bind(ccVar, cc);
        if (ok && isTrue(r.reduce(r.inst(pred, sigma)))) {
          found = true;
          if (r.printouts)
            r.printouts->push_back(printTerm(r.reduce(r.inst(info, sigma))) + " [" + rule.label() + "]");
        }
        return false;
      });
    }
    for (size_t i = 0; i < sub->args.size(); ++i) {
      path.push_back(i);
      visit(sub->args[i]);
      path.pop_back();
    }
  };
  visit(s0);
  return m.boolConst(found);
}

// S =(*,*)=>* P suchThat C: breadth-first over reachable states
static TermP reachSearch(Reducer& r, const TermP& t, const TermP& s0) {
  const Module& m = r.module();
  const TermP &pat = t->args[1], &pred = t->args[2];
  std::unordered_set<TermP, TermHash, TermEq> seen;
  std::deque<TermP> queue;
  seen.insert(s0);
  queue.push_back(s0);
  bool found = false;
  while (!queue.empty()) {
    TermP cur = queue.front();
    queue.pop_front();
    Subst s;
    bindPattern(r, pat, cur, s, [&] {
      if (isTrue(r.reduce(r.inst(pred, s)))) {
        found = true;
        if (r.printouts) r.printouts->push_back(printTerm(cur));
        return true;
      }
      return false;
    });
    for (auto& succ : r.successors(cur)) {
      if (seen.insert(succ.next).second) {
        if ((long long)seen.size() > r.budget.maxStates)
          throw BudgetExceeded("states", "state budget of " + std::to_string(r.budget.maxStates) + " exceeded");
        queue.push_back(succ.next);
      }
    }
  }
  r.lastVisited = (long long)seen.size();
  return m.boolConst(found);
}

TermP searchBuiltin(Reducer& r, const TermP& t) {
  const Module& m = r.module();
  TermP s0 = r.reduce(t->args[0]);
  switch (t->op->builtin) {
    case Builtin::SearchStep:
      return stepSearch(r, t, s0);
    case Builtin::SearchOne:
      return m.boolConst(!r.successors(s0).empty());
    case Builtin::SearchReach:
      return reachSearch(r, t, s0);
    default:
      return t;
  }
}

}  // namespace cafe
