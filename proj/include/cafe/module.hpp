#pragma once
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cafe/term.hpp"

namespace cafe {

struct CafeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Rule {
  std::vector<std::string> labels;
  TermP lhs, rhs, cond;   // cond is null when unconditional
  bool nonexec = false;
  bool trans = false;
  bool lemma = false;     // taken on trust, reported when used
  std::string origin;
  std::string label() const { return labels.empty() ? "" : labels.front(); }
  bool hasLabel(const std::string& l) const;
  std::string text() const;
};

struct Param {
  std::string name;
  std::vector<SortId> sorts;
  std::vector<const Op*> ops;
  SortId principal = -1;
};

struct SigReport {
  bool sensible = true;
  bool regular = true;
  std::vector<std::string> problems;
};

class Module {
 public:
  std::string name;
  std::vector<SortId> sorts;
  std::vector<std::pair<SortId, SortId>> subsorts;   // (sub, super)
  std::vector<const Op*> ops;
  std::vector<Rule> eqs, trs;
  std::vector<Param> params;
  std::vector<std::pair<std::string, SortId>> vars;
  SortId principal = -1;
  bool hasNat = false;
  bool hasRwl = false;

  // adders used while building
  void addSort(SortId s);
  void addSubsort(SortId sub, SortId super);
  void addOp(const Op* op);
  void addRule(const Rule& r, bool front = false);
  void addVar(const std::string& n, SortId s);
  void import(const Module& m);

  // computes the subsort closure, families and rule indices; throws on cycles
  void finalize();
  bool finalized() const { return final_; }

  bool hasSort(SortId s) const;
  bool leq(SortId a, SortId b) const;
  SortId lub(SortId a, SortId b) const;
  bool sameComponent(SortId a, SortId b) const;
  const std::vector<const Op*>& family(const Op* op) const;
  bool sameFamily(const Op* a, const Op* b) const;
  const Op* resolve(const Op* op, const std::vector<TermP>& args) const;
  bool wellSorted(const Op* op, const std::vector<TermP>& args) const;

  TermP mk(const Op* op, std::vector<TermP> args) const;
  TermP constant(const Op* op) const { return mk(op, {}); }
  TermP natLit(long long v) const;
  TermP boolConst(bool b) const;
  SortId natSort() const;

  const std::vector<int>& eqsFor(const Op* op) const;
  const std::vector<int>& trsFor(const Op* op) const;
  std::optional<SortId> varSort(const std::string& n) const;
  const Rule* findRule(const std::string& label) const;

  SigReport checkSignature() const;

 private:
  bool final_ = false;
  std::vector<std::vector<char>> leq_;
  std::vector<int> comp_;
  std::unordered_map<const Op*, int> famOf_;
  std::vector<std::vector<const Op*>> families_;
  std::unordered_map<int, std::vector<int>> eqIndex_, trIndex_;
  std::unordered_set<std::string> ruleKeys_;
  std::vector<int> idx_;
};

using ModuleP = std::shared_ptr<const Module>;

// the boolean constants are shared by every module
const Op* trueOp();
const Op* falseOp();
const Op* eqOp();
const Op* eqeqOp();
const Op* ifOp();
const Op* notOp();
const Op* andOp();
const Op* sortTestOp(SortId s);
SortId boolSort();

}  // namespace cafe
