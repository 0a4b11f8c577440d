#include "cafe/parser.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <set>

namespace cafe {

struct TermParser::Chart {
  const std::vector<std::string>& toks;
  const VarScope& scope;
  std::vector<int> depth;   // bracket depth before token k
  std::vector<int> match;   // index of the closing bracket, or -1
  std::vector<std::optional<std::vector<Cand>>> memo;
  int n;
  Chart(const std::vector<std::string>& t, const VarScope& s) : toks(t), scope(s), n((int)t.size()) {
    depth.assign(n + 1, 0);
    match.assign(n, -1);
    std::vector<int> stack;
    for (int k = 0; k < n; ++k) {
      const auto& x = toks[k];
      depth[k + 1] = depth[k];
      if (x == "(" || x == "[" || x == "{") {
        depth[k + 1]++;
        stack.push_back(k);
      } else if (x == ")" || x == "]" || x == "}") {
        depth[k + 1]--;
        if (!stack.empty()) match[stack.back()] = k, stack.pop_back();
      }
    }
    memo.resize((size_t)(n + 1) * (n + 1));
  }
  bool balanced(int a, int b) const {
    if (a >= b || depth[a] != depth[b]) return false;
    for (int k = a; k < b; ++k) {
      if (depth[k] < depth[a]) return false;
      if (depth[k] == depth[a] && (toks[k] == "," || toks[k] == ";")) return false;
    }
    return true;
  }
};

namespace {

std::optional<std::pair<std::string, std::string>> splitVarToken(const std::string& tok) {
  size_t p = tok.find(':');
  if (p == std::string::npos || p == 0 || p + 1 >= tok.size()) return std::nullopt;
  return std::make_pair(tok.substr(0, p), tok.substr(p + 1));
}

bool isDigits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit((unsigned char)c); });
}

std::optional<SortId> moduleSort(const Module& m, const std::string& name) {
  for (SortId s : m.sorts)
    if (sortName(s) == name) return s;
  return std::nullopt;
}

}  // namespace

TermParser::TermParser(const Module& m) : m_(m) {
  std::map<std::string, size_t> byPattern;
  for (const Op* op : m.ops) {
    if (op->builtin == Builtin::SortTest || op->builtin == Builtin::NatLit) continue;
    auto addRep = [&](std::vector<const Op*>& reps) {
      for (auto* r : reps)
        if (m.sameFamily(r, op)) return;
      reps.push_back(op);
    };
    if (op->standard) {
      if (op->arity.empty()) addRep(constants_[op->name]);
      else addRep(standard_[op->name]);
      continue;
    }
    std::string key;
    for (auto& e : op->pattern) key += e + "\x01";
    auto it = byPattern.find(key);
    if (it == byPattern.end()) {
      it = byPattern.emplace(key, patterns_.size()).first;
      patterns_.push_back({op->pattern, {}, op->prec, op->assoc});
    }
    addRep(patterns_[it->second].reps);
  }
}

void TermParser::scanVars(const std::vector<std::string>& toks, VarScope& scope) const {
  for (auto& t : toks) {
    auto v = splitVarToken(t);
    if (!v) continue;
    if (auto s = moduleSort(m_, v->second)) scope[v->first] = *s;
  }
}

void TermParser::addCand(std::vector<Cand>& out, TermP t, int prec) const {
  for (auto& c : out) {
    if (c.t->sort == t->sort && equalAC(c.t, t)) {
      c.prec = std::min(c.prec, prec);
      return;
    }
  }
  out.push_back({std::move(t), prec});
}

namespace {

// cartesian product over argument candidate lists, capped
template <class F>
void product(const std::vector<std::vector<TermP>>& lists, F&& f) {
  std::vector<TermP> cur(lists.size());
  int budget = 256;
  std::function<void(size_t)> rec = [&](size_t k) {
    if (budget <= 0) return;
    if (k == lists.size()) {
      --budget;
      f(cur);
      return;
    }
    for (auto& t : lists[k]) {
      cur[k] = t;
      rec(k + 1);
    }
  };
  rec(0);
}

}  // namespace

void TermParser::build(Chart& c, const Pattern& p, const std::vector<std::pair<int, int>>& spans,
                       std::vector<Cand>& out) const {
  const auto& e = p.elems;
  size_t L = e.size();
  bool prefix = e.front() != "_";
  std::vector<std::vector<TermP>> lists;
  size_t hole = 0;
  for (size_t k = 0; k < L; ++k) {
    if (e[k] != "_") continue;
    auto [a, b] = spans[hole++];
    int limit = 1 << 20;
    bool strict = false;
    if (k == 0) limit = p.prec;
    if (k == L - 1) {
      limit = p.prec;
      strict = !prefix && !p.assoc;
    }
    std::vector<TermP> ok;
    for (auto& cd : span(c, a, b))
      if (strict ? cd.prec < limit : cd.prec <= limit) ok.push_back(cd.t);
    if (ok.empty()) return;
    lists.push_back(std::move(ok));
  }
  bool closed = e.front() != "_" && e.back() != "_";
  product(lists, [&](const std::vector<TermP>& args) {
    for (const Op* rep : p.reps) {
      const Op* r = m_.resolve(rep, args);
      if (!m_.wellSorted(r, args)) continue;
      TermP t = (r->ac() && args.size() == 2) ? m_.mk(r, {args[1], args[0]}) : m_.mk(r, args);
      addCand(out, t, closed ? 0 : p.prec);
    }
  });
}

void TermParser::tryPattern(Chart& c, const Pattern& p, int i, int j, std::vector<Cand>& out) const {
  const auto& e = p.elems;
  int L = (int)e.size();
  if (L > j - i) return;
  if (e.front() != "_" && c.toks[i] != e.front()) return;
  if (e.back() != "_" && c.toks[j - 1] != e.back()) return;
  std::vector<std::pair<int, int>> spans;
  std::function<void(int, int)> align = [&](int k, int pos) {
    if (k == L) {
      if (pos == j) build(c, p, spans, out);
      return;
    }
    if (pos >= j) return;
    if (e[k] != "_") {
      if (c.toks[pos] == e[k]) align(k + 1, pos + 1);
      return;
    }
    if (k == L - 1) {
      if (c.balanced(pos, j)) {
        spans.emplace_back(pos, j);
        align(k + 1, j);
        spans.pop_back();
      }
      return;
    }
    int remaining = L - k - 1;
    for (int q = pos + 1; q <= j - remaining; ++q) {
      if (e[k + 1] != "_" && c.toks[q] != e[k + 1]) continue;
      if (!c.balanced(pos, q)) continue;
      spans.emplace_back(pos, q);
      align(k + 1, q);
      spans.pop_back();
    }
  };
  align(0, i);
}

const std::vector<TermParser::Cand>& TermParser::span(Chart& c, int i, int j) const {
  auto& slot = c.memo[(size_t)i * (c.n + 1) + j];
  if (slot) return *slot;
  slot.emplace();
  std::vector<Cand> out;
  const auto& toks = c.toks;
  if (j - i == 1) {
    const std::string& tk = toks[i];
    bool isVar = false;
    if (auto it = c.scope.find(tk); it != c.scope.end()) {
      addCand(out, mkVar(tk, it->second), 0);
      isVar = true;
    } else if (auto v = splitVarToken(tk)) {
      if (auto s = moduleSort(m_, v->second)) {
        addCand(out, mkVar(v->first, *s), 0);
        isVar = true;
      }
    } else if (auto s = m_.varSort(tk)) {
      addCand(out, mkVar(tk, *s), 0);
      isVar = true;
    }
    if (!isVar) {
      if (auto it = constants_.find(tk); it != constants_.end())
        for (auto* rep : it->second) addCand(out, m_.constant(m_.resolve(rep, {})), 0);
      if (m_.hasNat && isDigits(tk) && tk.size() < 18) addCand(out, m_.natLit(std::stoll(tk)), 0);
    }
  } else {
    if (toks[i] == "(" && c.match[i] == j - 1)
      for (auto& cd : span(c, i + 1, j - 1)) addCand(out, cd.t, 0);
    if (j - i >= 3 && toks[i + 1] == "(" && c.match[i + 1] == j - 1) {
      auto it = standard_.find(toks[i]);
      if (it != standard_.end()) {
        // top-level commas; mixfix ops may use commas too, so try every grouping that fits an arity
        std::vector<int> commas;
        for (int k = i + 2; k < j - 1; ++k)
          if (toks[k] == "," && c.depth[k] == c.depth[i + 2]) commas.push_back(k);
        std::set<size_t> arities;
        for (auto* rep : it->second) arities.insert(rep->nargs());
        for (size_t n : arities) {
          if (n == 0 || n - 1 > commas.size()) continue;
          std::vector<int> pick;
          std::function<void(size_t)> choose = [&](size_t from) {
            if (pick.size() == n - 1) {
              std::vector<std::vector<TermP>> lists;
              int start = i + 2;
              for (size_t g = 0; g <= pick.size(); ++g) {
                int end = g < pick.size() ? pick[g] : j - 1;
                if (start >= end || c.depth[start] != c.depth[end]) return;
                std::vector<TermP> l;
                for (auto& cd : span(c, start, end)) l.push_back(cd.t);
                if (l.empty()) return;
                lists.push_back(std::move(l));
                start = end + 1;
              }
              product(lists, [&](const std::vector<TermP>& args) {
                for (const Op* rep : it->second) {
                  if (rep->nargs() != args.size()) continue;
                  const Op* r = m_.resolve(rep, args);
                  if (m_.wellSorted(r, args)) addCand(out, m_.mk(r, args), 0);
                }
              });
              return;
            }
            for (size_t q = from; q < commas.size(); ++q) {
              pick.push_back(commas[q]);
              choose(q + 1);
              pick.pop_back();
            }
          };
          choose(0);
        }
      }
    }
    if (j - i >= 3 && toks[j - 2] == ":is") {
      if (auto s = moduleSort(m_, toks[j - 1]))
        for (auto& cd : span(c, i, j - 2))
          if (cd.prec <= 41) addCand(out, m_.mk(sortTestOp(*s), {cd.t}), 41);
    }
    for (auto& p : patterns_) tryPattern(c, p, i, j, out);
  }
  slot = std::move(out);
  return *slot;
}

std::vector<TermP> TermParser::parseAll(const std::vector<std::string>& toks, const VarScope& scope) const {
  std::vector<TermP> res;
  if (toks.empty()) return res;
  Chart c(toks, scope);
  for (auto& cd : span(c, 0, c.n)) res.push_back(cd.t);
  return res;
}

TermP TermParser::parse(const std::vector<std::string>& toks, const VarScope& scope, SortId expected) const {
  std::string text;
  for (auto& t : toks) text += (text.empty() ? "" : " ") + t;
  if (toks.empty()) throw ParseError("empty term");
  auto all = parseAll(toks, scope);
  if (expected != kUniversal) {
    std::vector<TermP> fit;
    for (auto& t : all)
      if (m_.leq(t->sort, expected)) fit.push_back(t);
    if (!fit.empty()) all = fit;
  }
  if (all.empty()) throw ParseError("no parse for: " + text);
  if (all.size() == 1) return all[0];
  // the same term at several sorts: keep the least one
  bool same = true;
  for (auto& t : all) same = same && equalAC(t, all[0]);
  if (same) {
    TermP best = all[0];
    for (auto& t : all)
      if (m_.leq(t->sort, best->sort)) best = t;
    return best;
  }
  std::string msg = "ambiguous term: " + text;
  for (auto& t : all) msg += "\n  " + printTerm(t) + " : " + sortName(t->sort);
  throw ParseError(msg);
}

}  // namespace cafe
