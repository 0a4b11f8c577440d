#pragma once
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cafe/module.hpp"
#include "cafe/rewrite.hpp"

namespace cafe {

struct Goal {
  std::string name;             // root, 1, 2-1, ...
  int parent = -1;
  std::vector<int> children;
  std::string tactic;           // the tactic that created the goal
  ModuleP ctm;
  std::vector<Rule> ina;        // introduced axioms
  std::vector<Rule> stp;        // sentences to prove
  bool dcd = false;
  bool ntg = false;
};

struct Tactic {
  enum Kind { Csp, Init } kind = Csp;
  std::string name;
  std::vector<std::vector<Rule>> cases;   // Csp: the axioms of each child
  // Init
  std::string label;                      // source rule label, empty for an inline equation
  Rule inlineRule;
  Subst subst;
  std::string asName;
};

class ProofTree {
 public:
  ProofTree(ModuleP ctm, std::vector<Rule> stp, Budget b);

  std::vector<Goal> goals;
  Budget budget;
  std::set<std::string> lemmas;   // modules whose lemmas were used in discharges

  int target() const;
  bool proved() const { return goals[0].dcd; }
  ModuleP context(int g);
  // reduces every sentence of the goal; marks it discharged when all sides meet
  bool discharge(int g, std::vector<std::string>* reduced = nullptr);
  std::vector<int> applyTactic(int g, const Tactic& t);
  // runs an :apply sequence from the current target; returns the status line
  std::string apply(const std::vector<std::string>& seq, const std::map<std::string, Tactic>& defs,
                    std::vector<std::string>& notes);
  bool select(const std::string& name);
  std::vector<std::string> showProof() const;
  std::vector<std::string> describe(int g) const;
  int find(const std::string& name) const;
  // at most one next target; discharged goals still reduce to their right-hand sides
  bool checkInvariants(std::string* why);

 private:
  void settle();
  int firstOpen(int g) const;
  std::map<int, ModuleP> ctx_;
};

}  // namespace cafe
