#include "cafe/module.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace cafe {

bool Rule::hasLabel(const std::string& l) const {
  return std::find(labels.begin(), labels.end(), l) != labels.end();
}

namespace {
// a side whose own top is an equation needs parens to read back unambiguously
std::string side(const TermP& t) {
  bool eqTop = !t->isVar() && t->op->infixLike() &&
               std::count(t->op->pattern.begin(), t->op->pattern.end(), std::string("=")) > 0;
  return printTerm(t, eqTop);
}
}  // namespace

std::string Rule::text() const {
  std::string kw = trans ? (cond ? "ctr" : "tr") : (cond ? "ceq" : "eq");
  std::string s = kw + " ";
  if (!labels.empty()) {
    s += "[";
    for (size_t i = 0; i < labels.size(); ++i) s += (i ? " " : "") + labels[i];
    s += "]: ";
  }
  s += side(lhs) + (trans ? " => " : " = ") + side(rhs);
  if (cond) s += " if " + printTerm(cond, false);
  return s + " .";
}

SortId boolSort() {
  static SortId b = internSort("Bool");
  return b;
}

namespace {
const Op* boolOp(const std::string& name, size_t n, int prec, bool ac) {
  Op o;
  o.name = name;
  o.arity.assign(n, boolSort());
  o.coarity = boolSort();
  o.constr = n == 0;
  o.assoc = o.comm = ac;
  o.prec = prec;
  o.precGiven = prec != defaultPrec(name, n);
  return internOp(o);
}
}  // namespace

const Op* trueOp() { static const Op* o = boolOp("true", 0, 0, false); return o; }
const Op* falseOp() { static const Op* o = boolOp("false", 0, 0, false); return o; }
const Op* notOp() { static const Op* o = boolOp("not_", 1, 53, false); return o; }
const Op* andOp() { static const Op* o = boolOp("_and_", 2, 55, true); return o; }

const Op* eqOp() {
  static const Op* o = [] {
    Op p;
    p.name = "_=_";
    p.arity = {kUniversal, kUniversal};
    p.coarity = boolSort();
    p.comm = true;
    p.prec = 51;
    p.precGiven = true;
    p.builtin = Builtin::Eq;
    return internOp(p);
  }();
  return o;
}

const Op* eqeqOp() {
  static const Op* o = [] {
    Op p;
    p.name = "_==_";
    p.arity = {kUniversal, kUniversal};
    p.coarity = boolSort();
    p.prec = 51;
    p.precGiven = true;
    p.builtin = Builtin::EqEq;
    return internOp(p);
  }();
  return o;
}

const Op* ifOp() {
  static const Op* o = [] {
    Op p;
    p.name = "if_then_else_fi";
    p.arity = {boolSort(), kUniversal, kUniversal};
    p.coarity = kUniversal;
    p.builtin = Builtin::If;
    return internOp(p);
  }();
  return o;
}

const Op* sortTestOp(SortId s) {
  Op p;
  p.name = "_:is " + sortName(s);
  p.arity = {kUniversal};
  p.coarity = boolSort();
  p.prec = 41;
  p.precGiven = true;
  p.builtin = Builtin::SortTest;
  p.testSort = s;
  return internOp(p);
}

void Module::addSort(SortId s) {
  if (std::find(sorts.begin(), sorts.end(), s) == sorts.end()) sorts.push_back(s);
  final_ = false;
}

void Module::addSubsort(SortId sub, SortId super) {
  addSort(sub);
  addSort(super);
  auto e = std::make_pair(sub, super);
  if (std::find(subsorts.begin(), subsorts.end(), e) == subsorts.end()) subsorts.push_back(e);
  final_ = false;
}

void Module::addOp(const Op* op) {
  if (std::find(ops.begin(), ops.end(), op) != ops.end()) return;
  for (auto* o : ops) {
    if (o->name == op->name && o->arity == op->arity && o->coarity == op->coarity && o->builtin == op->builtin)
      throw CafeError("operator " + op->name + " declared twice with different attributes");
  }
  ops.push_back(op);
  final_ = false;
}

namespace {
std::string ruleKey(const Rule& r) {
  std::string k = r.trans ? "T" : "E";
  k += r.nonexec ? "n" : "x";
  for (auto& l : r.labels) k += l + ";";
  k += fingerprint(r.lhs) + "=" + fingerprint(r.rhs);
  if (r.cond) k += "|" + fingerprint(r.cond);
  return k;
}
}  // namespace

void Module::addRule(const Rule& r, bool front) {
  std::string k = ruleKey(r);
  if (!ruleKeys_.insert(k).second) return;
  auto& v = r.trans ? trs : eqs;
  if (front) v.insert(v.begin(), r);
  else v.push_back(r);
  final_ = false;
}

void Module::addVar(const std::string& n, SortId s) {
  for (auto& v : vars)
    if (v.first == n) { v.second = s; return; }
  vars.emplace_back(n, s);
}

void Module::import(const Module& m) {
  for (SortId s : m.sorts) addSort(s);
  for (auto& e : m.subsorts) addSubsort(e.first, e.second);
  for (auto* o : m.ops) addOp(o);
  for (auto& r : m.eqs) addRule(r);
  for (auto& r : m.trs) addRule(r);
  for (auto& p : m.params) {
    bool dup = false;
    for (auto& q : params) dup = dup || q.name == p.name;
    if (!dup) params.push_back(p);
  }
  hasNat = hasNat || m.hasNat;
  hasRwl = hasRwl || m.hasRwl;
}

void Module::finalize() {
  int n = sortCount();
  leq_.assign(sorts.size(), std::vector<char>(sorts.size(), 0));
  std::vector<int> idx(n, -1);
  for (size_t i = 0; i < sorts.size(); ++i) idx[sorts[i]] = (int)i, leq_[i][i] = 1;
  for (auto& e : subsorts) leq_[idx[e.first]][idx[e.second]] = 1;
  size_t k = sorts.size();
  for (size_t m = 0; m < k; ++m)
    for (size_t i = 0; i < k; ++i)
      if (leq_[i][m])
        for (size_t j = 0; j < k; ++j)
          if (leq_[m][j]) leq_[i][j] = 1;
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      if (i != j && leq_[i][j] && leq_[j][i])
        throw CafeError("subsort cycle between " + sortName(sorts[i]) + " and " + sortName(sorts[j]));
  // connected components of the subsort graph
  comp_.assign(k, -1);
  int c = 0;
  for (size_t i = 0; i < k; ++i) {
    if (comp_[i] >= 0) continue;
    std::vector<size_t> stack{i};
    comp_[i] = c;
    while (!stack.empty()) {
      size_t x = stack.back();
      stack.pop_back();
      for (size_t y = 0; y < k; ++y)
        if (comp_[y] < 0 && (leq_[x][y] || leq_[y][x])) comp_[y] = c, stack.push_back(y);
    }
    ++c;
  }
  // operator families: same name and arity length, coarity in one component
  famOf_.clear();
  families_.clear();
  for (auto* o : ops) {
    int found = -1;
    for (size_t f = 0; f < families_.size(); ++f) {
      const Op* rep = families_[f].front();
      if (rep->nameId == o->nameId && sameComponent(rep->coarity, o->coarity)) { found = (int)f; break; }
    }
    if (found < 0) {
      found = (int)families_.size();
      families_.emplace_back();
    }
    families_[found].push_back(o);
    famOf_[o] = found;
  }
  eqIndex_.clear();
  trIndex_.clear();
  for (size_t i = 0; i < eqs.size(); ++i)
    if (!eqs[i].lhs->isVar()) eqIndex_[eqs[i].lhs->op->nameId].push_back((int)i);
  for (size_t i = 0; i < trs.size(); ++i)
    if (!trs[i].lhs->isVar()) trIndex_[trs[i].lhs->op->nameId].push_back((int)i);
  idx_ = std::move(idx);
  final_ = true;
}

bool Module::hasSort(SortId s) const { return std::find(sorts.begin(), sorts.end(), s) != sorts.end(); }

bool Module::leq(SortId a, SortId b) const {
  if (a == b || b == kUniversal) return true;
  if (a == kUniversal) return false;
  if (a >= (SortId)idx_.size() || b >= (SortId)idx_.size()) return false;
  int i = idx_[a], j = idx_[b];
  if (i < 0 || j < 0) return false;
  return leq_[i][j];
}

bool Module::sameComponent(SortId a, SortId b) const {
  if (a == b) return true;
  if (a == kUniversal || b == kUniversal) return false;
  if (a >= (SortId)idx_.size() || b >= (SortId)idx_.size()) return false;
  int i = idx_[a], j = idx_[b];
  return i >= 0 && j >= 0 && comp_[i] == comp_[j];
}

SortId Module::lub(SortId a, SortId b) const {
  if (leq(a, b)) return b;
  if (leq(b, a)) return a;
  std::vector<SortId> ups;
  for (SortId s : sorts)
    if (leq(a, s) && leq(b, s)) ups.push_back(s);
  std::vector<SortId> minimal;
  for (SortId s : ups) {
    bool isMin = true;
    for (SortId t : ups)
      if (t != s && leq(t, s)) isMin = false;
    if (isMin) minimal.push_back(s);
  }
  return minimal.size() == 1 ? minimal[0] : kUniversal;
}

const std::vector<const Op*>& Module::family(const Op* op) const {
  static thread_local std::vector<const Op*> single;
  auto it = famOf_.find(op);
  if (it != famOf_.end()) return families_[it->second];
  single.assign(1, op);
  return single;
}

bool Module::sameFamily(const Op* a, const Op* b) const {
  if (a == b) return true;
  if (a->nameId != b->nameId) return false;
  auto ia = famOf_.find(a), ib = famOf_.find(b);
  if (ia == famOf_.end() || ib == famOf_.end()) return true;
  return ia->second == ib->second;
}

bool Module::wellSorted(const Op* d, const std::vector<TermP>& args) const {
  if (d->assoc && d->arity.size() == 2) {
    for (auto& a : args)
      if (!leq(a->sort, d->arity[0]) && !leq(a->sort, d->arity[1])) return false;
    return true;
  }
  if (args.size() != d->arity.size()) return false;
  for (size_t i = 0; i < args.size(); ++i)
    if (!leq(args[i]->sort, d->arity[i])) return false;
  return true;
}

const Op* Module::resolve(const Op* op, const std::vector<TermP>& args) const {
  auto it = famOf_.find(op);
  if (it == famOf_.end()) return op;
  const auto& fam = families_[it->second];
  if (fam.size() == 1) return op;
  const Op* best = nullptr;
  for (auto* d : fam) {
    if (!wellSorted(d, args)) continue;
    if (!best || (leq(d->coarity, best->coarity) && d->coarity != best->coarity)) best = d;
  }
  return best ? best : op;
}

TermP Module::mk(const Op* op, std::vector<TermP> args) const {
  if (args.empty()) return mkRaw(op, {}, op->coarity);
  if (op->assoc) {
    std::vector<TermP> flat;
    flat.reserve(args.size());
    for (auto& a : args) {
      if (!a->isVar() && a->op->nameId == op->nameId && a->op->assoc)
        flat.insert(flat.end(), a->args.begin(), a->args.end());
      else
        flat.push_back(std::move(a));
    }
    args = std::move(flat);
  }
  if (op->id) {
    const Op* id = op->id;
    std::vector<TermP> kept;
    for (auto& a : args)
      if (a->isVar() || !a->args.empty() || a->op->nameId != id->nameId) kept.push_back(a);
    if (kept.size() != args.size()) {
      if (kept.empty()) return constant(id);
      if (kept.size() == 1 && (op->assoc || op->nargs() == 2)) return kept[0];
      args = std::move(kept);
    }
  }
  if (op->assoc && args.size() == 1) return args[0];
  const Op* r = resolve(op, args);
  SortId s = r->coarity;
  if (r->builtin == Builtin::If && args.size() == 3) s = lub(args[1]->sort, args[2]->sort);
  return mkRaw(r, std::move(args), s);
}

SortId Module::natSort() const {
  static SortId n = internSort("Nat");
  return n;
}

TermP Module::natLit(long long v) const {
  Op p;
  p.name = std::to_string(v);
  p.coarity = natSort();
  p.constr = true;
  p.builtin = Builtin::NatLit;
  p.natValue = v;
  return mkRaw(internOp(p), {}, natSort());
}

TermP Module::boolConst(bool b) const { return constant(b ? trueOp() : falseOp()); }

const std::vector<int>& Module::eqsFor(const Op* op) const {
  static const std::vector<int> none;
  auto it = eqIndex_.find(op->nameId);
  return it == eqIndex_.end() ? none : it->second;
}

const std::vector<int>& Module::trsFor(const Op* op) const {
  static const std::vector<int> none;
  auto it = trIndex_.find(op->nameId);
  return it == trIndex_.end() ? none : it->second;
}

std::optional<SortId> Module::varSort(const std::string& n) const {
  for (auto& v : vars)
    if (v.first == n) return v.second;
  return std::nullopt;
}

const Rule* Module::findRule(const std::string& label) const {
  for (auto& r : eqs)
    if (r.hasLabel(label)) return &r;
  for (auto& r : trs)
    if (r.hasLabel(label)) return &r;
  return nullptr;
}

SigReport Module::checkSignature() const {
  SigReport rep;
  std::vector<const Op*> user;
  for (auto* o : ops) {
    if (o->builtin != Builtin::None) continue;
    bool univ = o->coarity == kUniversal;
    for (SortId s : o->arity) univ = univ || s == kUniversal;
    if (!univ) user.push_back(o);
  }
  // sensible: same-named ranks whose arities are connected have connected coarities
  for (size_t i = 0; i < user.size(); ++i)
    for (size_t j = i + 1; j < user.size(); ++j) {
      const Op *a = user[i], *b = user[j];
      if (a->name != b->name || a->arity.size() != b->arity.size()) continue;
      bool argsConnected = true;
      for (size_t k = 0; k < a->arity.size(); ++k)
        argsConnected = argsConnected && sameComponent(a->arity[k], b->arity[k]);
      if (argsConnected && !sameComponent(a->coarity, b->coarity)) {
        rep.sensible = false;
        rep.problems.push_back("not sensible: " + a->name + " has unrelated coarities " +
                               sortName(a->coarity) + " and " + sortName(b->coarity));
      }
    }
  // regular: every argument tuple below some rank has a least applicable rank
  std::set<std::string> done;
  for (auto* o : user) {
    std::string key = o->name + "/" + std::to_string(o->arity.size());
    if (!done.insert(key).second) continue;
    std::vector<const Op*> same;
    for (auto* p : user)
      if (p->name == o->name && p->arity.size() == o->arity.size()) same.push_back(p);
    size_t n = o->arity.size();
    std::vector<SortId> w(n);
    std::function<void(size_t)> rec = [&](size_t pos) {
      if (pos == n) {
        std::vector<const Op*> fit;
        for (auto* d : same) {
          bool ok = true;
          for (size_t k = 0; k < n; ++k) ok = ok && leq(w[k], d->arity[k]);
          if (ok) fit.push_back(d);
        }
        if (fit.size() < 2) return;
        bool hasLeast = false;
        for (auto* d : fit) {
          bool least = true;
          for (auto* e : fit) least = least && leq(d->coarity, e->coarity);
          hasLeast = hasLeast || least;
        }
        if (!hasLeast) {
          rep.regular = false;
          std::string args;
          for (SortId s : w) args += " " + sortName(s);
          rep.problems.push_back("not regular: " + o->name + " has no least rank for" +
                                 (args.empty() ? std::string(" the constant") : args));
        }
        return;
      }
      for (SortId s : sorts) {
        w[pos] = s;
        rec(pos + 1);
      }
    };
    rec(0);
  }
  return rep;
}

}  // namespace cafe
