#pragma once
#include <map>
#include <string>
#include <vector>

#include "cafe/module.hpp"

namespace cafe {

struct ParseError : CafeError {
  using CafeError::CafeError;
};

using VarScope = std::map<std::string, SortId>;

// mixfix term parser over a finalized module
class TermParser {
 public:
  explicit TermParser(const Module& m);

  // registers `X:Sort` tokens as variables in scope
  void scanVars(const std::vector<std::string>& toks, VarScope& scope) const;
  TermP parse(const std::vector<std::string>& toks, const VarScope& scope,
              SortId expected = kUniversal) const;
  std::vector<TermP> parseAll(const std::vector<std::string>& toks, const VarScope& scope) const;
  const Module& module() const { return m_; }

 private:
  struct Cand {
    TermP t;
    int prec;
  };
  struct Pattern {
    std::vector<std::string> elems;
    std::vector<const Op*> reps;   // one representative per family
    int prec;
    bool assoc;
  };
  struct Chart;

  const std::vector<Cand>& span(Chart& c, int i, int j) const;
  void addCand(std::vector<Cand>& out, TermP t, int prec) const;
  void tryPattern(Chart& c, const Pattern& p, int i, int j, std::vector<Cand>& out) const;
  void build(Chart& c, const Pattern& p, const std::vector<std::pair<int, int>>& spans,
             std::vector<Cand>& out) const;

  const Module& m_;
  std::vector<Pattern> patterns_;
  std::map<std::string, std::vector<const Op*>> constants_;
  std::map<std::string, std::vector<const Op*>> standard_;   // f(a,b) ops by name
};

}  // namespace cafe
