#include "cafe/term.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <unordered_map>

namespace cafe {

namespace {

struct SortTable {
  std::vector<std::string> names{"*Universal*"};
  std::unordered_map<std::string, SortId> ids{{"*Universal*", 0}};
};
SortTable& sorts() { static SortTable t; return t; }

uint64_t mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool reservedChar(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',' || c == ';';
}

// splits one piece of an operator name the way the lexer would
void splitPiece(const std::string& piece, std::vector<std::string>& out) {
  std::string cur;
  for (char c : piece) {
    if (reservedChar(c)) {
      if (!cur.empty()) out.push_back(cur), cur.clear();
      out.push_back(std::string(1, c));
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
}

}  // namespace

SortId internSort(const std::string& name) {
  auto& t = sorts();
  auto it = t.ids.find(name);
  if (it != t.ids.end()) return it->second;
  SortId id = (SortId)t.names.size();
  t.names.push_back(name);
  t.ids.emplace(name, id);
  return id;
}
const std::string& sortName(SortId s) { return sorts().names.at(s); }
int sortCount() { return (int)sorts().names.size(); }

std::vector<std::string> opPattern(const std::string& name) {
  std::vector<std::string> pat;
  if (name.find('_') == std::string::npos) {
    pat.push_back(name);
    return pat;
  }
  std::string piece;
  for (char c : name) {
    if (c == '_') {
      if (!piece.empty()) splitPiece(piece, pat), piece.clear();
      pat.push_back("_");
    } else {
      piece += c;
    }
  }
  if (!piece.empty()) splitPiece(piece, pat);
  return pat;
}

bool Op::infixLike() const {
  return !standard && !pattern.empty() && (pattern.front() == "_" || pattern.back() == "_");
}

int defaultPrec(const std::string& name, size_t nargs) {
  auto pat = opPattern(name);
  if (pat.size() == 1 || nargs == 0) return 0;
  if (pat.front() != "_" && pat.back() != "_") return 0;
  if (pat.size() == 2 && pat.front() != "_") return 15;
  return 41;
}

const Op* internOp(const Op& proto) {
  static std::map<std::string, std::unique_ptr<Op>> table;
  static std::unordered_map<std::string, int> nameIds;
  std::string key = proto.name + "|";
  for (SortId s : proto.arity) key += std::to_string(s) + ",";
  key += ">" + std::to_string(proto.coarity) + "|" + (proto.constr ? "c" : "") +
         (proto.assoc ? "a" : "") + (proto.comm ? "m" : "") + "|" +
         (proto.id ? std::to_string(proto.id->serial) : "") + "|" + std::to_string(proto.prec) + "|" +
         std::to_string((int)proto.builtin) + "|" + std::to_string(proto.testSort);
  auto it = table.find(key);
  if (it != table.end()) return it->second.get();
  auto op = std::make_unique<Op>(proto);
  op->serial = (int)table.size() + 1;
  std::string nk = proto.name + "/" + std::to_string(proto.arity.size());
  auto nit = nameIds.find(nk);
  if (nit == nameIds.end()) nit = nameIds.emplace(nk, (int)nameIds.size() + 1).first;
  op->nameId = nit->second;
  if (op->builtin == Builtin::SortTest) {
    op->pattern = {"_", ":is", sortName(op->testSort)};
    op->display.clear();
  } else {
    op->pattern = opPattern(op->name);
    op->display.clear();
    for (size_t a = 0, b; a <= op->name.size(); a = b + 1) {
      b = op->name.find('_', a);
      if (b == std::string::npos) b = op->name.size();
      if (b > a) op->display.push_back(op->name.substr(a, b - a));
      if (b < op->name.size()) op->display.push_back("_");
    }
  }
  op->standard = op->pattern.size() == 1;
  const Op* raw = op.get();
  table.emplace(key, std::move(op));
  return raw;
}

TermP mkVar(const std::string& name, SortId s) {
  auto t = std::make_shared<Term>();
  t->name = name;
  t->sort = s;
  t->ground = false;
  t->hash = mix(std::hash<std::string>()(name) * 31 + (uint64_t)s);
  return t;
}

TermP mkRaw(const Op* op, std::vector<TermP> args, SortId sort) {
  auto t = std::make_shared<Term>();
  t->op = op;
  t->sort = sort;
  t->args = std::move(args);
  uint64_t h = mix((uint64_t)op->nameId);
  if (op->comm) {
    uint64_t sum = 0;
    for (auto& a : t->args) sum += mix(a->hash);
    h = mix(h ^ sum);
    t->order.resize(t->args.size());
    std::iota(t->order.begin(), t->order.end(), 0);
    std::stable_sort(t->order.begin(), t->order.end(), [&](uint32_t x, uint32_t y) {
      return compareTerms(*t->args[x], *t->args[y]) < 0;
    });
  } else {
    for (auto& a : t->args) h = mix(h * 1000003ULL + a->hash);
  }
  for (auto& a : t->args)
    if (!a->ground) t->ground = false;
  t->hash = h;
  return t;
}

int compareTerms(const Term& a, const Term& b) {
  if (&a == &b) return 0;
  if (a.isVar() != b.isVar()) return a.isVar() ? -1 : 1;
  if (a.isVar()) {
    int c = a.name.compare(b.name);
    if (c) return c < 0 ? -1 : 1;
    return a.sort < b.sort ? -1 : (a.sort > b.sort ? 1 : 0);
  }
  if (a.op->nameId != b.op->nameId) return a.op->nameId < b.op->nameId ? -1 : 1;
  if (a.op->builtin == Builtin::NatLit && a.op != b.op) return a.op->natValue < b.op->natValue ? -1 : 1;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
  bool comm = a.op->comm && b.op->comm;
  for (size_t i = 0; i < a.args.size(); ++i) {
    const Term& x = comm ? *a.args[a.order[i]] : *a.args[i];
    const Term& y = comm ? *b.args[b.order[i]] : *b.args[i];
    int c = compareTerms(x, y);
    if (c) return c;
  }
  return 0;
}

bool equalAC(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.hash != b.hash) return false;
  return compareTerms(a, b) == 0;
}
bool equalAC(const TermP& a, const TermP& b) { return equalAC(*a, *b); }

namespace {

enum class Ctx { Top, Std, Mix };

std::string pr(const Term& t, Ctx ctx, bool wrapTop) {
  if (t.isVar()) return t.name;
  const Op* op = t.op;
  if (op->standard) {
    if (t.args.empty()) return op->name;
    std::string s = op->name + "(";
    for (size_t i = 0; i < t.args.size(); ++i) {
      if (i) s += ",";
      s += pr(*t.args[i], Ctx::Std, wrapTop);
    }
    return s + ")";
  }
  const auto& pat = op->display.empty() ? op->pattern : op->display;
  size_t holes = std::count(pat.begin(), pat.end(), std::string("_"));
  std::string s;
  auto append = [&](const std::string& piece, bool isArg) {
    if (s.empty()) { s = piece; return; }
    bool glue = isArg && !piece.empty() && piece[0] == '(' && pat.size() == 2 && pat[0] != "_";
    s += glue ? piece : " " + piece;
  };
  if (op->assoc && t.args.size() > holes && holes == 2 && pat.front() == "_" && pat.back() == "_") {
    std::string sep;
    for (size_t k = 1; k + 1 < pat.size(); ++k) sep += (sep.empty() ? "" : " ") + pat[k];
    for (size_t i = 0; i < t.args.size(); ++i) {
      if (i && !sep.empty()) append(sep, false);
      append(pr(*t.args[i], Ctx::Mix, wrapTop), true);
    }
  } else {
    size_t ai = 0;
    for (auto& tok : pat) {
      if (tok == "_") {
        append(ai < t.args.size() ? pr(*t.args[ai], Ctx::Mix, wrapTop) : "?", true);
        ++ai;
      } else {
        append(tok, false);
      }
    }
  }
  bool startsHole = pat.front() == "_";
  bool endsHole = pat.back() == "_";
  bool wrap = false;
  if (startsHole) wrap = !(ctx == Ctx::Top && !wrapTop);
  else if (endsHole) wrap = ctx == Ctx::Mix;
  return wrap ? "(" + s + ")" : s;
}

void fp(const Term& t, std::string& out) {
  if (t.isVar()) {
    out += "?" + t.name + ":" + std::to_string(t.sort);
    return;
  }
  out += "#" + std::to_string(t.op->serial);
  if (t.args.empty()) return;
  out += "(";
  for (size_t i = 0; i < t.args.size(); ++i) {
    fp(t.op->comm ? *t.args[t.order[i]] : *t.args[i], out);
    out += ",";
  }
  out += ")";
}

}  // namespace

std::string printTerm(const TermP& t, bool wrapTop) { return pr(*t, Ctx::Top, wrapTop); }

std::string fingerprint(const TermP& t) {
  std::string s;
  fp(*t, s);
  return s;
}

void collectVars(const TermP& t, std::vector<TermP>& out) {
  if (t->ground) return;
  if (t->isVar()) {
    for (auto& v : out)
      if (sameVar(*v, *t)) return;
    out.push_back(t);
    return;
  }
  for (auto& a : t->args) collectVars(a, out);
}

size_t termSize(const TermP& t) {
  size_t n = 1;
  for (auto& a : t->args) n += termSize(a);
  return n;
}

}  // namespace cafe
