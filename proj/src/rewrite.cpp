#include "cafe/rewrite.hpp"

#include <algorithm>

namespace cafe {

TermP applySubst(const Module& m, const TermP& t, const Subst& s) {
  if (t->ground) return t;
  if (t->isVar()) {
    const TermP* v = s.lookup(*t);
    return v ? *v : t;
  }
  std::vector<TermP> args;
  args.reserve(t->args.size());
  bool changed = false;
  for (auto& a : t->args) {
    TermP b = applySubst(m, a, s);
    changed = changed || b.get() != a.get();
    args.push_back(std::move(b));
  }
  if (!changed) return t;
  return m.mk(t->op, std::move(args));
}

TermP replaceAt(const Module& m, const TermP& t, const std::vector<size_t>& path, size_t depth, const TermP& by) {
  if (depth == path.size()) return by;
  std::vector<TermP> args = t->args;
  args.at(path[depth]) = replaceAt(m, args[path[depth]], path, depth + 1, by);
  return m.mk(t->op, std::move(args));
}

const TermP& subtermAt(const TermP& t, const std::vector<size_t>& path) {
  const TermP* cur = &t;
  for (size_t i : path) cur = &(*cur)->args.at(i);
  return *cur;
}

namespace {

std::vector<TermP> elemsOf(const Module& m, const Op* f, const TermP& v) {
  if (!v->isVar() && v->op->assoc && m.sameFamily(f, v->op)) return v->args;
  if (f->id && !v->isVar() && v->args.empty() && v->op->nameId == f->id->nameId) return {};
  return {v};
}

}  // namespace

bool Matcher::onlySingles(const Op* f, SortId varSort) const {
  for (const Op* d : m_.family(f))
    if (m_.leq(d->coarity, varSort)) return false;
  return true;
}

bool Matcher::match(const TermP& pat, const TermP& subj, Subst& s, const Cont& k) {
  if (pat->isVar()) {
    if (const TermP* b = s.lookup(*pat)) return equalAC(*b, subj) && k();
    if (!m_.leq(subj->sort, pat->sort)) return false;
    s.bind(pat, subj);
    bool r = k();
    s.pop();
    return r;
  }
  if (pat->ground) return equalAC(pat, subj) && k();
  return matchApp(*pat, subj, s, k, false);
}

bool Matcher::matchExt(const TermP& pat, const TermP& subj, Subst& s, const Cont& k) {
  extLeft.clear();
  extRight.clear();
  if (!pat->isVar() && pat->op->assoc && !subj->isVar() && m_.sameFamily(pat->op, subj->op))
    return matchApp(*pat, subj, s, k, true);
  return match(pat, subj, s, k);
}

bool Matcher::matchSeq(const std::vector<TermP>& ps, const std::vector<TermP>& ts, size_t i, Subst& s,
                       const Cont& k) {
  if (i == ps.size()) return k();
  return match(ps[i], ts[i], s, [&] { return matchSeq(ps, ts, i + 1, s, k); });
}

bool Matcher::matchApp(const Term& p, const TermP& t, Subst& s, const Cont& k, bool ext) {
  const Op* f = p.op;
  bool sameTop = !t->isVar() && m_.sameFamily(f, t->op);
  if (f->assoc) {
    std::vector<TermP> elems;
    if (sameTop) elems = t->args;
    else if (!f->id) return false;
    else elems = elemsOf(m_, f, t);
    if (f->comm) return matchAC(f, p.args, elems, s, k, ext && sameTop);
    return matchAssoc(f, p.args, elems, s, k, ext && sameTop);
  }
  if (!sameTop || p.args.size() != t->args.size()) return false;
  if (f->comm && p.args.size() == 2) {
    if (matchSeq(p.args, t->args, 0, s, k)) return true;
    if (equalAC(t->args[0], t->args[1])) return false;
    std::vector<TermP> sw{t->args[1], t->args[0]};
    return matchSeq(p.args, sw, 0, s, k);
  }
  return matchSeq(p.args, t->args, 0, s, k);
}

bool Matcher::matchAC(const Op* f, const std::vector<TermP>& ps, const std::vector<TermP>& ts, Subst& s,
                      const Cont& k, bool ext) {
  std::vector<TermP> cls;
  std::vector<int> cnt;
  for (auto& t : ts) {
    size_t j = 0;
    while (j < cls.size() && !equalAC(cls[j], t)) ++j;
    if (j == cls.size()) cls.push_back(t), cnt.push_back(0);
    cnt[j]++;
  }
  std::vector<const TermP*> order;
  for (auto& p : ps)
    if (!p->isVar()) order.push_back(&p);
  // element-sorted variables before collection variables
  for (auto& p : ps)
    if (p->isVar() && onlySingles(f, p->sort)) order.push_back(&p);
  for (auto& p : ps)
    if (p->isVar() && !onlySingles(f, p->sort)) order.push_back(&p);
  auto remainingElems = [&] {
    std::vector<TermP> el;
    for (size_t j = 0; j < cls.size(); ++j)
      for (int c = 0; c < cnt[j]; ++c) el.push_back(cls[j]);
    return el;
  };
  std::function<bool(size_t)> step = [&](size_t i) -> bool {
    if (i == order.size()) {
      int left = 0;
      for (int c : cnt) left += c;
      if (left == 0) {
        if (ext) extLeft.clear();
        return k();
      }
      if (!ext) return false;
      extLeft = remainingElems();
      return k();
    }
    const TermP& p = *order[i];
    if (p->isVar()) {
      if (const TermP* b = s.lookup(*p)) {
        std::vector<size_t> taken;
        bool ok = true;
        for (auto& e : elemsOf(m_, f, *b)) {
          size_t j = 0;
          while (j < cls.size() && !(cnt[j] > 0 && equalAC(cls[j], e))) ++j;
          if (j == cls.size()) { ok = false; break; }
          cnt[j]--;
          taken.push_back(j);
        }
        bool r = ok && step(i + 1);
        for (size_t j : taken) cnt[j]++;
        return r;
      }
      bool singles = onlySingles(f, p->sort);
      bool idOk = f->id && m_.leq(f->id->coarity, p->sort);
      // a variable repeated k times at this level can take at most cnt/k of each element
      int mult = 0;
      for (auto& q : ps)
        if (q->isVar() && q->name == p->name && q->sort == p->sort) ++mult;
      auto tryValue = [&](const std::vector<int>& take) -> bool {
        std::vector<TermP> el;
        for (size_t j = 0; j < cls.size(); ++j)
          for (int c = 0; c < take[j]; ++c) el.push_back(cls[j]);
        TermP value;
        if (el.empty()) {
          if (!idOk) return false;
          value = m_.constant(f->id);
        } else if (el.size() == 1) {
          value = el[0];
        } else {
          if (singles) return false;
          value = m_.mk(f, el);
        }
        if (!m_.leq(value->sort, p->sort)) return false;
        for (size_t j = 0; j < cls.size(); ++j) cnt[j] -= take[j];
        s.bind(p, value);
        bool r = step(i + 1);
        s.pop();
        for (size_t j = 0; j < cls.size(); ++j) cnt[j] += take[j];
        return r;
      };
      if (i + 1 == order.size() && !ext) return tryValue(std::vector<int>(cnt));  // copy: tryValue edits cnt
      if (singles) {
        std::vector<int> take(cls.size(), 0);
        for (size_t j = 0; j < cls.size(); ++j) {
          if (cnt[j] < mult) continue;
          take[j] = 1;
          if (tryValue(take)) return true;
          take[j] = 0;
        }
        return idOk && tryValue(take);
      }
      std::vector<int> take(cls.size(), 0);
      std::function<bool(size_t)> choose = [&](size_t j) -> bool {
        if (j == cls.size()) return tryValue(take);
        for (int c = cnt[j] / mult; c >= 0; --c) {
          take[j] = c;
          if (choose(j + 1)) return true;
        }
        take[j] = 0;
        return false;
      };
      return choose(0);
    }
    for (size_t j = 0; j < cls.size(); ++j) {
      if (cnt[j] == 0) continue;
      const TermP& e = cls[j];
      if (!p->isVar() && !e->isVar() && !p->op->id && !m_.sameFamily(p->op, e->op)) continue;
      cnt[j]--;
      bool r = match(p, e, s, [&] { return step(i + 1); });
      cnt[j]++;
      if (r) return true;
    }
    return false;
  };
  return step(0);
}

bool Matcher::matchAssoc(const Op* f, const std::vector<TermP>& ps, const std::vector<TermP>& ts, Subst& s,
                         const Cont& k, bool ext) {
  size_t n = ps.size(), m = ts.size();
  std::function<bool(size_t, size_t)> step = [&](size_t i, size_t pos) -> bool {
    if (i == n) {
      if (pos == m) {
        if (ext) extRight.clear();
        return k();
      }
      if (!ext) return false;
      extRight.assign(ts.begin() + (long)pos, ts.end());
      return k();
    }
    const TermP& p = ps[i];
    if (p->isVar()) {
      if (const TermP* b = s.lookup(*p)) {
        auto el = elemsOf(m_, f, *b);
        if (pos + el.size() > m) return false;
        for (size_t q = 0; q < el.size(); ++q)
          if (!equalAC(el[q], ts[pos + q])) return false;
        return step(i + 1, pos + el.size());
      }
      bool singles = onlySingles(f, p->sort);
      bool idOk = f->id && m_.leq(f->id->coarity, p->sort);
      size_t minL = idOk ? 0 : 1, maxL = singles ? 1 : m - pos;
      if (i + 1 == n && !ext) {
        if (m - pos < minL || m - pos > maxL) return false;
        minL = maxL = m - pos;
      }
      for (size_t len = minL; len <= maxL && pos + len <= m; ++len) {
        TermP value;
        if (len == 0) value = m_.constant(f->id);
        else if (len == 1) value = ts[pos];
        else value = m_.mk(f, std::vector<TermP>(ts.begin() + (long)pos, ts.begin() + (long)(pos + len)));
        if (!m_.leq(value->sort, p->sort)) continue;
        s.bind(p, value);
        bool r = step(i + 1, pos + len);
        s.pop();
        if (r) return true;
      }
      return false;
    }
    if (pos >= m) return false;
    return match(p, ts[pos], s, [&] { return step(i + 1, pos + 1); });
  };
  if (!ext) return step(0, 0);
  for (size_t a = 0; a <= m; ++a) {
    extLeft.assign(ts.begin(), ts.begin() + (long)a);
    if (step(0, a)) return true;
  }
  return false;
}

TermP contractum(const Module& m, const Op* top, const TermP& rhsInst, const Matcher& mt) {
  if (mt.extLeft.empty() && mt.extRight.empty()) return rhsInst;
  std::vector<TermP> args;
  if (top->comm) {
    args.push_back(rhsInst);
    args.insert(args.end(), mt.extLeft.begin(), mt.extLeft.end());
  } else {
    args = mt.extLeft;
    args.push_back(rhsInst);
    args.insert(args.end(), mt.extRight.begin(), mt.extRight.end());
  }
  return m.mk(top, std::move(args));
}

// ---------------------------------------------------------------- traces

std::string Trace::sequence() const {
  std::string s = printTerm(start, false);
  for (auto& st : steps) s += " {" + (st.cond ? st.cond->sequence() : std::string("true")) + "} " + printTerm(st.after, false);
  return s;
}

void Trace::lines(std::vector<std::string>& out, int indent) const {
  std::string pad(indent * 2, ' ');
  for (auto& st : steps) {
    out.push_back(pad + printTerm(st.redex, false) + " => " + printTerm(st.contractum, false) + "  [" + st.label +
                  "] {" + (st.cond ? st.cond->sequence() : std::string("true")) + "}");
    if (st.cond) st.cond->lines(out, indent + 1);
  }
}

// ---------------------------------------------------------------- reducer

Reducer::Reducer(ModuleP m, Budget b) : budget(b), m_(std::move(m)) {}

void Reducer::countStep() {
  if (++steps > budget.maxSteps)
    throw BudgetExceeded("steps", "step budget of " + std::to_string(budget.maxSteps) + " exceeded");
}

namespace {
struct NestGuard {
  int& n;
  explicit NestGuard(int& x) : n(x) { ++n; }
  ~NestGuard() { --n; }
};
bool isTrue(const TermP& t) { return !t->isVar() && t->op == trueOp(); }
bool isFalse(const TermP& t) { return !t->isVar() && t->op == falseOp(); }
}  // namespace

bool Reducer::evalCond(const TermP& c, bool traced, std::shared_ptr<Trace>* tr) {
  NestGuard g(nesting_);
  if (nesting_ > budget.maxNesting)
    throw BudgetExceeded("nesting", "condition nesting exceeded " + std::to_string(budget.maxNesting));
  if (traced) {
    auto t = std::make_shared<Trace>();
    TermP r = reduceTraced(c, *t);
    if (tr) *tr = t;
    return isTrue(r);
  }
  return isTrue(norm(c));
}

bool Reducer::holds(const TermP& cond) { return evalCond(cond, false, nullptr); }

bool Reducer::builtinTop(const TermP& t, TopResult& out) {
  const Op* op = t->op;
  switch (op->builtin) {
    case Builtin::Eq: {
      const TermP &a = t->args[0], &b = t->args[1];
      if (equalAC(a, b)) out.result = m_->boolConst(true);
      else if ((isTrue(a) && isFalse(b)) || (isFalse(a) && isTrue(b))) out.result = m_->boolConst(false);
      else return false;
      out.label = "=";
      return true;
    }
    case Builtin::EqEq:
      out.result = m_->boolConst(equalAC(t->args[0], t->args[1]));
      out.label = "==";
      return true;
    case Builtin::SortTest:
      out.result = m_->boolConst(m_->leq(t->args[0]->sort, op->testSort));
      out.label = ":is";
      return true;
    default:
      return false;
  }
}

bool Reducer::rewriteTop(const TermP& t, TopResult& out, bool traced) {
  if (builtinTop(t, out)) {
    countStep();
    return true;
  }
  for (int idx : m_->eqsFor(t->op)) {
    const Rule& r = m_->eqs[idx];
    if (r.nonexec) continue;
    Matcher mt(*m_);
    Subst s;
    auto k = [&]() -> bool {
      std::shared_ptr<Trace> ct;
      if (r.cond && !evalCond(applySubst(*m_, r.cond, s), traced, &ct)) return false;
      out.result = contractum(*m_, r.lhs->op, applySubst(*m_, r.rhs, s), mt);
      out.rule = &r;
      out.label = r.label().empty() ? r.text() : r.label();
      out.theta = s;
      out.cond = ct;
      return true;
    };
    if (mt.matchExt(r.lhs, t, s, k)) {
      countStep();
      if (r.lemma) lemmasUsed.insert(r.origin);
      return true;
    }
  }
  return false;
}

TermP Reducer::reduce(const TermP& t) { return norm(t); }

TermP Reducer::norm(const TermP& t) {
  if (t->isVar()) return t;
  auto it = memo_.find(t.get());
  if (it != memo_.end()) return it->second.second;
  TermP res;
  const Op* op = t->op;
  if (op->builtin == Builtin::If || op->builtin == Builtin::SearchStep || op->builtin == Builtin::SearchOne ||
      op->builtin == Builtin::SearchReach) {
    res = lazyBuiltin(t, false);
  } else {
    TermP cur = t;
    if (!t->args.empty()) {
      std::vector<TermP> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (auto& a : t->args) {
        TermP b = norm(a);
        changed = changed || b.get() != a.get();
        args.push_back(std::move(b));
      }
      if (changed) cur = m_->mk(op, std::move(args));
    }
    auto it2 = cur.get() != t.get() ? memo_.find(cur.get()) : memo_.end();
    TopResult tr;
    if (it2 != memo_.end()) res = it2->second.second;
    else if (!cur->isVar() && rewriteTop(cur, tr, false)) res = norm(tr.result);
    else res = cur;
  }
  memo_[t.get()] = {t, res};
  if (res.get() != t.get()) memo_[res.get()] = {res, res};
  return res;
}

TermP searchBuiltin(Reducer& r, const TermP& t);

TermP Reducer::lazyBuiltin(const TermP& t, bool traced) {
  if (t->op->builtin == Builtin::If) {
    TermP c = traced ? t->args[0] : norm(t->args[0]);
    if (isTrue(c)) { countStep(); return norm(t->args[1]); }
    if (isFalse(c)) { countStep(); return norm(t->args[2]); }
    return m_->mk(t->op, {c, norm(t->args[1]), norm(t->args[2])});
  }
  return searchBuiltin(*this, t);
}

bool Reducer::stepAt(const TermP& t, std::vector<size_t>& path, TraceStep& st, TermP& out) {
  if (t->isVar() || normal_.count(t.get())) return false;
  const Op* op = t->op;
  auto tryArg = [&](size_t i) -> bool {
    TermP sub;
    path.push_back(i);
    if (stepAt(t->args[i], path, st, sub)) {
      std::vector<TermP> args = t->args;
      args[i] = sub;
      out = m_->mk(op, std::move(args));
      return true;
    }
    path.pop_back();
    return false;
  };
  auto builtinStep = [&](const TermP& res, const std::string& label) {
    st.pos = path;
    st.label = label;
    st.redex = t;
    st.contractum = res;
    out = res;
    return true;
  };
  if (op->builtin == Builtin::If) {
    if (tryArg(0)) return true;
    if (isTrue(t->args[0])) { countStep(); return builtinStep(t->args[1], "if"); }
    if (isFalse(t->args[0])) { countStep(); return builtinStep(t->args[2], "if"); }
    if (tryArg(1) || tryArg(2)) return true;
  } else if (op->builtin == Builtin::SearchStep || op->builtin == Builtin::SearchOne ||
             op->builtin == Builtin::SearchReach) {
    if (tryArg(0)) return true;
    return builtinStep(searchBuiltin(*this, t), "search");
  } else {
    for (size_t i = 0; i < t->args.size(); ++i)
      if (tryArg(i)) return true;
    TopResult tr;
    if (rewriteTop(t, tr, true)) {
      st.pos = path;
      st.label = tr.label;
      st.rule = tr.rule;
      st.theta = tr.theta;
      st.redex = t;
      st.contractum = tr.result;
      st.cond = tr.cond;
      out = tr.result;
      return true;
    }
  }
  normal_.insert(t.get());
  keep_.push_back(t);
  return false;
}

TermP Reducer::reduceTraced(const TermP& t, Trace& tr) {
  tr.start = t;
  TermP cur = t;
  for (;;) {
    std::vector<size_t> path;
    TraceStep st;
    TermP next;
    if (!stepAt(cur, path, st, next)) break;
    st.before = cur;
    st.after = next;
    tr.steps.push_back(std::move(st));
    cur = next;
  }
  tr.result = cur;
  return cur;
}

bool Reducer::replay(const Trace& tr, std::string* why) {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  TermP cur = tr.start;
  for (size_t i = 0; i < tr.steps.size(); ++i) {
    const TraceStep& st = tr.steps[i];
    if (!equalAC(cur, st.before)) return fail("step " + std::to_string(i) + ": unexpected source term");
    TermP red;
    try {
      red = subtermAt(cur, st.pos);
    } catch (const std::out_of_range&) {
      return fail("step " + std::to_string(i) + ": bad position");
    }
    if (!equalAC(red, st.redex)) return fail("step " + std::to_string(i) + ": redex mismatch");
    if (st.rule) {
      Matcher mt(*m_);
      Subst s = st.theta;
      TermP c;
      bool ok = mt.matchExt(st.rule->lhs, red, s, [&] {
        c = contractum(*m_, st.rule->lhs->op, applySubst(*m_, st.rule->rhs, s), mt);
        return equalAC(c, st.contractum);
      });
      if (!ok) return fail("step " + std::to_string(i) + ": rule does not reproduce the contractum");
      if (st.rule->cond) {
        if (!st.cond || !isTrue(st.cond->result)) return fail("step " + std::to_string(i) + ": condition not shown true");
        if (!equalAC(st.cond->start, applySubst(*m_, st.rule->cond, st.theta)))
          return fail("step " + std::to_string(i) + ": condition instance mismatch");
        if (!replay(*st.cond, why)) return false;
      }
    }
    TermP next = replaceAt(*m_, cur, st.pos, 0, st.contractum);
    if (!equalAC(next, st.after)) return fail("step " + std::to_string(i) + ": result mismatch");
    cur = next;
  }
  if (!equalAC(cur, tr.result)) return fail("final term mismatch");
  return true;
}

std::vector<Reducer::Succ> Reducer::successors(const TermP& s) {
  std::vector<Succ> out;
  std::vector<size_t> path;
  std::function<void(const TermP&)> visit = [&](const TermP& t) {
    if (t->isVar()) return;
    for (int idx : m_->trsFor(t->op)) {
      const Rule& r = m_->trs[idx];
      if (r.nonexec) continue;
      Matcher mt(*m_);
      Subst sub;
      mt.matchExt(r.lhs, t, sub, [&] {
        if (r.cond && !holds(applySubst(*m_, r.cond, sub))) return false;
        TermP c = contractum(*m_, r.lhs->op, applySubst(*m_, r.rhs, sub), mt);
        out.push_back({&r, norm(replaceAt(*m_, s, path, 0, c))});
        return false;
      });
    }
    for (size_t i = 0; i < t->args.size(); ++i) {
      path.push_back(i);
      visit(t->args[i]);
      path.pop_back();
    }
  };
  visit(s);
  return out;
}

}  // namespace cafe
