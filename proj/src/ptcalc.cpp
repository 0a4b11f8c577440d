#include "cafe/ptcalc.hpp"

#include <algorithm>
#include <functional>

namespace cafe {

ProofTree::ProofTree(ModuleP ctm, std::vector<Rule> stp, Budget b) : budget(b) {
  Goal root;
  root.name = "root";
  root.ctm = std::move(ctm);
  root.stp = std::move(stp);
  root.ntg = true;
  goals.push_back(std::move(root));
}

int ProofTree::target() const {
  for (size_t i = 0; i < goals.size(); ++i)
    if (goals[i].ntg) return (int)i;
  return -1;
}

int ProofTree::find(const std::string& name) const {
  for (size_t i = 0; i < goals.size(); ++i)
    if (goals[i].name == name) return (int)i;
  return -1;
}

ModuleP ProofTree::context(int g) {
  auto it = ctx_.find(g);
  if (it != ctx_.end()) return it->second;
  const Goal& G = goals[g];
  ModuleP m;
  if (G.ina.empty()) {
    m = G.ctm;
  } else {
    auto c = std::make_shared<Module>(*G.ctm);
    // case assumptions win over the module's own equations
    for (auto it = G.ina.rbegin(); it != G.ina.rend(); ++it) c->addRule(*it, true);
    c->finalize();
    m = c;
  }
  ctx_[g] = m;
  return m;
}

bool ProofTree::discharge(int g, std::vector<std::string>* reduced) {
  Goal& G = goals[g];
  Reducer red(context(g), budget);
  bool all = true;
  for (auto& s : G.stp) {
    TermP l = red.reduce(s.lhs), r = red.reduce(s.rhs);
    bool ok = equalAC(l, r);
    if (reduced) reduced->push_back(printTerm(l) + (ok ? "" : "  (expected " + printTerm(r) + ")"));
    all = all && ok;
  }
  lemmas.insert(red.lemmasUsed.begin(), red.lemmasUsed.end());
  if (all) G.dcd = true;
  return all;
}

static std::string childName(const Goal& p, size_t k) {
  return p.name == "root" ? std::to_string(k) : p.name + "-" + std::to_string(k);
}

std::vector<int> ProofTree::applyTactic(int g, const Tactic& t) {
  std::vector<std::vector<Rule>> cases;
  if (t.kind == Tactic::Csp) {
    cases = t.cases;
  } else {
    ModuleP ctx = context(g);
    Rule src;
    if (t.label.empty()) {
      src = t.inlineRule;
    } else {
      const Rule* r = ctx->findRule(t.label);
      if (!r) throw CafeError("no equation labelled " + t.label + " at goal " + goals[g].name);
      src = *r;
    }
    Reducer red(ctx, budget);
    Rule n;
    n.lhs = red.reduce(applySubst(*ctx, src.lhs, t.subst));
    n.rhs = red.reduce(applySubst(*ctx, src.rhs, t.subst));
    if (src.cond) n.cond = applySubst(*ctx, src.cond, t.subst);
    n.trans = src.trans;
    n.origin = "init";
    if (!t.asName.empty()) n.labels = {t.asName};
    else n.labels = src.labels;
    if (n.lhs->isVar()) throw CafeError(t.name + ": instantiated left-hand side is a variable");
    std::vector<TermP> lv, used;
    collectVars(n.lhs, lv);
    collectVars(n.rhs, used);
    if (n.cond) collectVars(n.cond, used);
    for (auto& v : used)
      if (std::none_of(lv.begin(), lv.end(), [&](const TermP& x) { return sameVar(*x, *v); }))
        throw CafeError(t.name + ": instantiated equation is not executable (variable " + v->name + ")");
    std::vector<Rule> one;
    // an already valid instance adds nothing
    if (!equalAC(n.lhs, n.rhs)) one.push_back(n);
    cases.push_back(one);
  }
  std::vector<int> kids;
  for (size_t k = 0; k < cases.size(); ++k) {
    Goal c;
    c.name = childName(goals[g], k + 1);
    c.parent = g;
    c.tactic = t.name;
    c.ctm = goals[g].ctm;
    c.ina = goals[g].ina;
    c.ina.insert(c.ina.end(), cases[k].begin(), cases[k].end());
    c.stp = goals[g].stp;
    int id = (int)goals.size();
    goals.push_back(std::move(c));
    goals[g].children.push_back(id);
    kids.push_back(id);
  }
  return kids;
}

int ProofTree::firstOpen(int g) const {
  const Goal& G = goals[g];
  if (G.dcd) return -1;
  if (G.children.empty()) return g;
  for (int c : G.children) {
    int r = firstOpen(c);
    if (r >= 0) return r;
  }
  return -1;
}

void ProofTree::settle() {
  std::function<bool(int)> up = [&](int g) -> bool {
    Goal& G = goals[g];
    if (G.children.empty()) return G.dcd;
    bool all = true;
    for (int c : G.children) all = up(c) && all;
    if (all) G.dcd = true;
    return G.dcd;
  };
  up(0);
  for (auto& g : goals) g.ntg = false;
  int t = firstOpen(0);
  if (t >= 0) goals[t].ntg = true;
}

std::string ProofTree::apply(const std::vector<std::string>& seq, const std::map<std::string, Tactic>& defs,
                             std::vector<std::string>& notes) {
  int t = target();
  if (t < 0) throw CafeError("no target goal");
  for (auto& n : seq)
    if (n != "rd-" && !defs.count(n)) throw CafeError("undefined tactic " + n);
  std::vector<int> cur{t};
  for (auto& n : seq) {
    if (n == "rd-") {
      std::vector<int> open;
      for (int g : cur) {
        if (!discharge(g)) open.push_back(g);
      }
      cur = open;
      continue;
    }
    const Tactic& tac = defs.at(n);
    std::vector<int> next;
    for (int g : cur) {
      auto k = applyTactic(g, tac);
      next.insert(next.end(), k.begin(), k.end());
    }
    cur = next;
  }
  settle();
  if (!lemmas.empty()) {
    std::string l;
    for (auto& s : lemmas) l += (l.empty() ? "" : ", ") + s;
    notes.push_back("assumed lemmas used: " + l);
  }
  int nt = target();
  return nt < 0 ? "all goals discharged" : "next target: " + goals[nt].name;
}

bool ProofTree::select(const std::string& name) {
  int g = find(name);
  if (g < 0 || goals[g].dcd || !goals[g].children.empty()) return false;
  for (auto& x : goals) x.ntg = false;
  goals[g].ntg = true;
  return true;
}

std::vector<std::string> ProofTree::showProof() const {
  std::vector<std::string> out;
  std::function<void(int)> walk = [&](int g) {
    const Goal& G = goals[g];
    std::string line = G.ntg ? ">" : "";
    if (g == 0) {
      line += "root";
    } else {
      std::string lab = "[" + G.tactic + "]";
      if (lab.size() < 5) lab.resize(5, ' ');  // short labels get a column
      line += lab + " " + G.name;
    }
    if (G.dcd) line += "*";
    out.push_back(line);
    for (int c : G.children) walk(c);
  };
  walk(0);
  return out;
}

std::vector<std::string> ProofTree::describe(int g) const {
  const Goal& G = goals[g];
  std::vector<std::string> out;
  out.push_back("goal " + G.name + (G.ntg ? " (next target)" : "") + (G.dcd ? " discharged" : ""));
  out.push_back("  context: " + G.ctm->name);
  if (!G.tactic.empty()) out.push_back("  created by: " + G.tactic);
  for (auto& r : G.ina) out.push_back("  assumed: " + r.text());
  for (auto& r : G.stp) out.push_back("  to prove: " + r.text());
  return out;
}

bool ProofTree::checkInvariants(std::string* why) {
  int n = 0;
  for (auto& g : goals) n += g.ntg;
  if (n > 1) {
    if (why) *why = "more than one next target";
    return false;
  }
  for (size_t i = 0; i < goals.size(); ++i) {
    const Goal& G = goals[i];
    if (!G.dcd) continue;
    if (!G.children.empty()) {
      // an inner goal is discharged through its children, or directly
      bool kids = std::all_of(G.children.begin(), G.children.end(), [&](int c) { return goals[c].dcd; });
      if (kids) continue;
    }
    Reducer red(context((int)i), budget);
    for (auto& s : G.stp)
      if (!equalAC(red.reduce(s.lhs), red.reduce(s.rhs))) {
        if (why) *why = "goal " + G.name + " is marked discharged but does not reduce";
        return false;
      }
  }
  return true;
}

}  // namespace cafe
