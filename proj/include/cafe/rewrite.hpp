#pragma once
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cafe/module.hpp"

namespace cafe {

struct Subst {
  std::vector<std::pair<TermP, TermP>> binds;   // variable, value
  const TermP* lookup(const Term& v) const {
    for (auto& b : binds)
      if (sameVar(*b.first, v)) return &b.second;
    return nullptr;
  }
  void bind(const TermP& v, const TermP& val) { binds.emplace_back(v, val); }
  void pop() { binds.pop_back(); }
};

TermP applySubst(const Module& m, const TermP& t, const Subst& s);
// replaces the subterm at an argument path, renormalising on the way up
TermP replaceAt(const Module& m, const TermP& t, const std::vector<size_t>& path, size_t depth, const TermP& by);
const TermP& subtermAt(const TermP& t, const std::vector<size_t>& path);

class Matcher {
 public:
  using Cont = std::function<bool()>;
  explicit Matcher(const Module& m) : m_(m) {}
  // enumerates matchers of pat against subj; k returns true to stop the enumeration
  bool match(const TermP& pat, const TermP& subj, Subst& s, const Cont& k);
  // like match, but at the top of an assoc operator leftover arguments go to extLeft/extRight
  bool matchExt(const TermP& pat, const TermP& subj, Subst& s, const Cont& k);
  std::vector<TermP> extLeft, extRight;

 private:
  bool matchApp(const Term& p, const TermP& t, Subst& s, const Cont& k, bool ext);
  bool matchSeq(const std::vector<TermP>& ps, const std::vector<TermP>& ts, size_t i, Subst& s, const Cont& k);
  bool matchAC(const Op* f, const std::vector<TermP>& ps, const std::vector<TermP>& ts, Subst& s,
               const Cont& k, bool ext);
  bool matchAssoc(const Op* f, const std::vector<TermP>& ps, const std::vector<TermP>& ts, Subst& s,
                  const Cont& k, bool ext);
  bool onlySingles(const Op* f, SortId varSort) const;
  const Module& m_;
};

// builds the contractum of a top-level match, putting back extension leftovers
TermP contractum(const Module& m, const Op* top, const TermP& rhsInst, const Matcher& mt);

struct Budget {
  long long maxSteps = 1048576;
  int maxNesting = 512;
  long long maxStates = 1000000;
};

struct BudgetExceeded : CafeError {
  std::string kind;
  BudgetExceeded(const std::string& k, const std::string& msg) : CafeError(msg), kind(k) {}
};

struct Trace;
struct TraceStep {
  std::vector<size_t> pos;
  std::string label;
  const Rule* rule = nullptr;
  Subst theta;
  TermP redex, contractum, before, after;
  std::shared_ptr<Trace> cond;   // reduction of the instantiated condition
};

struct Trace {
  TermP start, result;
  std::vector<TraceStep> steps;
  std::string sequence() const;
  void lines(std::vector<std::string>& out, int indent = 0) const;
};

class Reducer {
 public:
  explicit Reducer(ModuleP m, Budget b = {});
  TermP reduce(const TermP& t);
  TermP reduceTraced(const TermP& t, Trace& tr);
  bool replay(const Trace& tr, std::string* why = nullptr);

  const Module& module() const { return *m_; }
  ModuleP modulePtr() const { return m_; }
  Budget budget;
  long long steps = 0;
  long long lastVisited = 0;
  std::vector<std::string>* printouts = nullptr;
  std::set<std::string> lemmasUsed;

  // transition successors of a state, conditions checked
  struct Succ {
    const Rule* rule;
    TermP next;
  };
  std::vector<Succ> successors(const TermP& s);
  bool holds(const TermP& cond);   // reduces to true, counting nesting
  TermP inst(const TermP& t, const Subst& s) { return applySubst(*m_, t, s); }

 private:
  struct TopResult {
    TermP result;
    std::string label;
    const Rule* rule = nullptr;
    Subst theta;
    std::shared_ptr<Trace> cond;
  };
  TermP norm(const TermP& t);
  bool rewriteTop(const TermP& t, TopResult& out, bool traced);
  bool builtinTop(const TermP& t, TopResult& out);
  TermP lazyBuiltin(const TermP& t, bool traced);
  bool stepAt(const TermP& t, std::vector<size_t>& path, TraceStep& st, TermP& out);
  void countStep();
  bool evalCond(const TermP& c, bool traced, std::shared_ptr<Trace>* tr);

  ModuleP m_;
  int nesting_ = 0;
  std::unordered_map<const Term*, std::pair<TermP, TermP>> memo_;
  std::unordered_set<const Term*> normal_;
  std::vector<TermP> keep_;
  friend struct SearchEngine;
};

}  // namespace cafe
