#include "cafe/elab.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "cafe/rewrite.hpp"

namespace cafe {

CafeError tokError(const Token& t, const std::string& msg) {
  return CafeError("line " + std::to_string(t.line) + ": " + msg);
}

static bool isOpen(const std::string& s) { return s == "(" || s == "[" || s == "{"; }
static bool isClose(const std::string& s) { return s == ")" || s == "]" || s == "}"; }

size_t findDot(const std::vector<Token>& toks, size_t i) {
  int d = 0;
  for (size_t k = i; k < toks.size(); ++k) {
    const auto& x = toks[k].text;
    if (isOpen(x)) ++d;
    else if (isClose(x)) --d;
    else if (x == "." && d <= 0) return k;
    if (d < 0) break;
  }
  throw tokError(toks[std::min(i, toks.size() - 1)], "missing '.'");
}

size_t matchClose(const std::vector<Token>& toks, size_t open) {
  int d = 0;
  for (size_t k = open; k < toks.size(); ++k) {
    if (isOpen(toks[k].text)) ++d;
    else if (isClose(toks[k].text) && --d == 0) return k;
  }
  throw tokError(toks[open], "unbalanced '" + toks[open].text + "'");
}

std::vector<std::string> words(const std::vector<Token>& toks, size_t from, size_t to) {
  std::vector<std::string> w;
  for (size_t k = from; k < to && k < toks.size(); ++k) w.push_back(toks[k].text);
  return w;
}

static std::string joinWords(const std::vector<std::string>& ws, const std::string& sep = " ") {
  std::string s;
  for (size_t i = 0; i < ws.size(); ++i) s += (i ? sep : "") + ws[i];
  return s;
}

// ---------------------------------------------------------------- module expressions

std::string ModExp::text() const {
  auto mapsText = [](const std::vector<MapItem>& ms) {
    std::string s = "{";
    for (size_t i = 0; i < ms.size(); ++i) {
      s += i ? ", " : "";
      s += ms[i].kind == MapItem::Sort ? "sort " : "op ";
      if (ms[i].kind == MapItem::TermOp)
        s += joinWords(ms[i].fromToks) + " -> " + joinWords(ms[i].toToks);
      else
        s += ms[i].from + " -> " + ms[i].to;
    }
    return s + "}";
  };
  switch (kind) {
    case Name:
      return name;
    case Sum: {
      std::string s;
      for (size_t i = 0; i < subs.size(); ++i) s += (i ? " + " : "") + subs[i]->text();
      return "(" + s + ")";
    }
    case Rename:
      return subs[0]->text() + "*" + mapsText(maps);
    case Inst: {
      std::string s = subs[0]->text() + "(";
      for (size_t i = 1; i < subs.size(); ++i) {
        s += (i > 1 ? ", " : "") + subs[i]->text();
        if (!argMaps[i - 1].empty()) s += mapsText(argMaps[i - 1]);
      }
      return s + ")";
    }
  }
  return name;
}

static bool nameToken(const std::string& s) {
  static const std::set<std::string> bad{"(", ")", "{", "}", "[", "]", ",", "+", "*", ".", ";"};
  return !bad.count(s);
}

static const Token& at(const std::vector<Token>& toks, size_t i) {
  static const Token eof{"<eof>", 0, 0, 0};
  return i < toks.size() ? toks[i] : (toks.empty() ? eof : toks.back());
}

static void expect(const std::vector<Token>& toks, size_t& i, const std::string& s) {
  if (i >= toks.size() || toks[i].text != s) throw tokError(at(toks, i), "expected '" + s + "'");
  ++i;
}

std::vector<MapItem> parseMaps(const std::vector<Token>& toks, size_t& i) {
  std::vector<MapItem> out;
  while (i < toks.size() && toks[i].text != "}") {
    MapItem m;
    const std::string& kw = toks[i].text;
    if (kw == "sort" || kw == "hsort") {
      ++i;
      m.kind = MapItem::Sort;
      m.from = at(toks, i++).text;
      expect(toks, i, "->");
      m.to = at(toks, i++).text;
    } else if (kw == "op" || kw == "bop") {
      ++i;
      int d = 0;
      while (i < toks.size() && !(d == 0 && toks[i].text == "->")) {
        if (isOpen(toks[i].text)) ++d;
        if (isClose(toks[i].text)) --d;
        m.fromToks.push_back(toks[i++].text);
      }
      expect(toks, i, "->");
      d = 0;
      while (i < toks.size()) {
        const auto& x = toks[i].text;
        if (d == 0 && (x == "," || x == "}")) break;
        if (isOpen(x)) ++d;
        if (isClose(x)) --d;
        m.toToks.push_back(toks[i++].text);
      }
      bool term = false;
      for (auto& w : m.fromToks) term = term || (w.find(':') != std::string::npos && w.size() > 1);
      m.kind = term ? MapItem::TermOp : MapItem::Op;
      m.from = joinWords(m.fromToks, "");
      m.to = joinWords(m.toToks, "");
    } else {
      throw tokError(toks[i], "bad map item '" + kw + "'");
    }
    out.push_back(std::move(m));
    if (i < toks.size() && toks[i].text == ",") ++i;
  }
  expect(toks, i, "}");
  return out;
}

static ModExpP parseSum(const std::vector<Token>& toks, size_t& i);

static ModExpP parsePrimary(const std::vector<Token>& toks, size_t& i) {
  if (i < toks.size() && toks[i].text == "(") {
    ++i;
    auto e = parseSum(toks, i);
    expect(toks, i, ")");
    return e;
  }
  if (i >= toks.size() || !nameToken(toks[i].text)) throw tokError(at(toks, i), "module name expected");
  auto e = std::make_shared<ModExp>();
  e->kind = ModExp::Name;
  e->name = toks[i++].text;
  return e;
}

static ModExpP parsePost(const std::vector<Token>& toks, size_t& i) {
  auto e = parsePrimary(toks, i);
  for (;;) {
    if (i < toks.size() && toks[i].text == "(") {
      ++i;
      auto in = std::make_shared<ModExp>();
      in->kind = ModExp::Inst;
      in->subs.push_back(e);
      for (;;) {
        in->subs.push_back(parseSum(toks, i));
        std::vector<MapItem> maps;
        if (i < toks.size() && toks[i].text == "{") {
          ++i;
          maps = parseMaps(toks, i);
        }
        in->argMaps.push_back(std::move(maps));
        if (i < toks.size() && toks[i].text == ",") { ++i; continue; }
        break;
      }
      expect(toks, i, ")");
      e = in;
    } else if (i + 1 < toks.size() && toks[i].text == "*" && toks[i + 1].text == "{") {
      i += 2;
      auto r = std::make_shared<ModExp>();
      r->kind = ModExp::Rename;
      r->subs.push_back(e);
      r->maps = parseMaps(toks, i);
      e = r;
    } else {
      return e;
    }
  }
}

static ModExpP parseSum(const std::vector<Token>& toks, size_t& i) {
  auto e = parsePost(toks, i);
  if (i >= toks.size() || toks[i].text != "+") return e;
  auto s = std::make_shared<ModExp>();
  s->kind = ModExp::Sum;
  s->subs.push_back(e);
  while (i < toks.size() && toks[i].text == "+") {
    ++i;
    s->subs.push_back(parsePost(toks, i));
  }
  return s;
}

ModExpP parseModExp(const std::vector<Token>& toks, size_t& i) { return parseSum(toks, i); }

// ---------------------------------------------------------------- renaming

namespace {

struct Renamer {
  const RenameSpec& spec;
  std::map<const Op*, const Op*> memo;

  SortId sort(SortId s) const {
    auto it = spec.sorts.find(s);
    return it == spec.sorts.end() ? s : it->second;
  }
  const Op* op(const Op* o) {
    if (!o) return o;
    auto it = memo.find(o);
    if (it != memo.end()) return it->second;
    const Op* r = o;
    switch (o->builtin) {
      case Builtin::SortTest:
        r = sortTestOp(sort(o->testSort));
        break;
      case Builtin::None: {
        Op p = *o;
        if (auto i = spec.ops.find(o); i != spec.ops.end()) p.name = i->second;
        else if (auto j = spec.opNames.find(o->name); j != spec.opNames.end()) p.name = j->second;
        for (auto& s : p.arity) s = sort(s);
        p.coarity = sort(p.coarity);
        p.id = op(o->id);
        if (!o->precGiven) p.prec = defaultPrec(p.name, p.arity.size());
        r = internOp(p);
        break;
      }
      default:
        break;
    }
    memo[o] = r;
    return r;
  }
  TermP term(const TermP& t, const Module& m) {
    if (t->isVar()) return mkVar(t->name, sort(t->sort));
    std::vector<TermP> args;
    for (auto& a : t->args) args.push_back(term(a, m));
    return m.mk(op(t->op), std::move(args));
  }
};

bool identitySpec(const RenameSpec& s) {
  for (auto& [a, b] : s.sorts)
    if (a != b) return false;
  return s.ops.empty() && s.opNames.empty();
}

}  // namespace

ModuleP renameModule(const Module& m, const RenameSpec& spec, size_t dropParams, const std::string& newName) {
  auto out = std::make_shared<Module>();
  out->name = newName;
  Renamer R{spec, {}};
  for (SortId s : m.sorts) out->addSort(R.sort(s));
  for (auto& [a, b] : m.subsorts) out->addSubsort(R.sort(a), R.sort(b));
  for (auto* o : m.ops) out->addOp(R.op(o));
  out->hasNat = m.hasNat;
  out->hasRwl = m.hasRwl;
  out->finalize();
  for (const auto* rules : {&m.eqs, &m.trs})
    for (const Rule& r : *rules) {
      Rule n = r;
      n.lhs = R.term(r.lhs, *out);
      n.rhs = R.term(r.rhs, *out);
      if (r.cond) n.cond = R.term(r.cond, *out);
      out->addRule(n);
    }
  for (size_t k = dropParams; k < m.params.size(); ++k) {
    Param p = m.params[k];
    for (auto& s : p.sorts) s = R.sort(s);
    for (auto& o : p.ops) o = R.op(o);
    if (p.principal >= 0) p.principal = R.sort(p.principal);
    out->params.push_back(p);
  }
  for (auto& [n, s] : m.vars) out->addVar(n, R.sort(s));
  out->principal = m.principal >= 0 ? R.sort(m.principal) : -1;
  out->finalize();
  return out;
}

// ---------------------------------------------------------------- rules

std::vector<TermP> searchBoundVars(const TermP& t) {
  std::vector<TermP> out;
  std::function<void(const TermP&)> walk = [&](const TermP& u) {
    if (u->isVar()) return;
    switch (u->op->builtin) {
      case Builtin::SearchStep:
        if (u->args.size() > 2) collectVars(u->args[1], out), collectVars(u->args[2], out);
        break;
      case Builtin::SearchOne:
      case Builtin::SearchReach:
        if (u->args.size() > 1) collectVars(u->args[1], out);
        break;
      default:
        break;
    }
    for (auto& a : u->args) walk(a);
  };
  walk(t);
  return out;
}

static std::vector<size_t> depth0(const std::vector<std::string>& ws, const std::string& tok) {
  std::vector<size_t> out;
  int d = 0;
  for (size_t k = 0; k < ws.size(); ++k) {
    if (isOpen(ws[k])) ++d;
    else if (isClose(ws[k])) --d;
    else if (d == 0 && ws[k] == tok) out.push_back(k);
  }
  return out;
}

static std::vector<std::string> slice(const std::vector<std::string>& ws, size_t a, size_t b) {
  return std::vector<std::string>(ws.begin() + a, ws.begin() + b);
}

Rule parseRuleWords(const TermParser& p, const std::vector<std::string>& wsIn, const std::string& kw,
                    bool checkVars, int line) {
  const Module& m = p.module();
  auto fail = [&](const std::string& msg) { return ParseError("line " + std::to_string(line) + ": " + msg); };
  Rule r;
  r.trans = kw == "tr" || kw == "ctr" || kw == "trans" || kw == "ctrans" || kw == "rl" || kw == "crl";
  bool conditional = kw == "ceq" || kw == "cq" || kw == "ctr" || kw == "ctrans" || kw == "crl";
  std::vector<std::string> ws = wsIn;
  if (!ws.empty() && ws[0] == "[") {
    size_t k = 1;
    while (k < ws.size() && ws[k] != "]") {
      if (ws[k] == ":nonexec") r.nonexec = true;
      else if (ws[k][0] != ':') r.labels.push_back(ws[k]);
      ++k;
    }
    if (k + 1 >= ws.size() || ws[k + 1] != ":") throw fail("bad rule label");
    ws.erase(ws.begin(), ws.begin() + (long)k + 2);
  }
  VarScope scope;
  p.scanVars(ws, scope);
  std::string sep = r.trans ? "=>" : "=";
  std::string lastErr = "no '" + sep + "' in rule";
  auto trySplit = [&](const std::vector<std::string>& body) -> bool {
    for (size_t k : depth0(body, sep)) {
      if (k == 0 || k + 1 >= body.size()) continue;
      try {
        TermP l = p.parse(slice(body, 0, k), scope);
        TermP rr = p.parse(slice(body, k + 1, body.size()), scope);
        if (l->sort != kUniversal && rr->sort != kUniversal && !m.sameComponent(l->sort, rr->sort)) {
          lastErr = "sorts of sides differ: " + sortName(l->sort) + " and " + sortName(rr->sort);
          continue;
        }
        r.lhs = l;
        r.rhs = rr;
        return true;
      } catch (const ParseError& e) {
        lastErr = e.what();
      }
    }
    return false;
  };
  bool ok = false;
  if (conditional) {
    auto ifs = depth0(ws, "if");
    for (size_t q = ifs.size(); q-- > 0 && !ok;) {
      size_t k = ifs[q];
      if (k + 1 >= ws.size()) continue;
      try {
        TermP c = p.parse(slice(ws, k + 1, ws.size()), scope, boolSort());
        if (!m.leq(c->sort, boolSort())) { lastErr = "condition is not a Bool"; continue; }
        if (trySplit(slice(ws, 0, k))) {
          r.cond = c;
          ok = true;
        }
      } catch (const ParseError& e) {
        lastErr = e.what();
      }
    }
    if (!ok) throw fail(lastErr);
  } else if (!trySplit(ws)) {
    throw fail(lastErr);
  }
  if (checkVars && !r.nonexec) {
    std::vector<TermP> lv, used;
    collectVars(r.lhs, lv);
    collectVars(r.rhs, used);
    if (r.cond) collectVars(r.cond, used);
    auto bound = searchBoundVars(r.rhs);
    if (r.cond) {
      auto b2 = searchBoundVars(r.cond);
      bound.insert(bound.end(), b2.begin(), b2.end());
    }
    for (auto& v : used) {
      auto same = [&](const TermP& x) { return sameVar(*x, *v); };
      if (std::none_of(lv.begin(), lv.end(), same) && std::none_of(bound.begin(), bound.end(), same))
        throw fail("variable " + v->name + " not bound by the left-hand side");
    }
    if (r.lhs->isVar()) throw fail("left-hand side is a variable");
  }
  return r;
}

// ---------------------------------------------------------------- declarations

DeclProcessor::DeclProcessor(Registry& reg, Module& m, Registry::Env env)
    : reg_(reg), m_(m), env_(std::move(env)) {}

bool DeclProcessor::isDeclKeyword(const std::string& kw) {
  static const std::set<std::string> k{"pr",  "protecting", "ex",  "extending", "inc", "including", "us",
                                       "using", "op", "ops", "pred", "preds", "var", "vars", "eq",
                                       "ceq", "cq", "tr", "ctr", "trans", "ctrans", "rl", "crl", "[",
                                       "bop", "bops", "sort", "sorts"};
  return k.count(kw) > 0;
}

const TermParser& DeclProcessor::parser() {
  if (dirty_ || !parser_) {
    m_.finalize();
    parser_ = std::make_unique<TermParser>(m_);
    dirty_ = false;
  }
  return *parser_;
}

SortId DeclProcessor::sortByName(const Token& t) {
  for (SortId s : m_.sorts)
    if (sortName(s) == t.text) return s;
  throw tokError(t, "unknown sort " + t.text);
}

void DeclProcessor::opDecl(const std::vector<Token>& toks, size_t b, size_t e, bool pred, bool many) {
  size_t colon = b;
  int d = 0;
  while (colon < e) {
    const auto& x = toks[colon].text;
    if (isOpen(x)) ++d;
    else if (isClose(x)) --d;
    else if (d == 0 && x == ":") break;
    ++colon;
  }
  if (colon >= e) throw tokError(toks[b], "missing ':' in operator declaration");
  std::vector<std::string> names;
  if (!many) {
    names.push_back(joinWords(words(toks, b, colon), ""));
  } else {
    for (size_t k = b; k < colon;) {
      if (toks[k].text == "(") {
        size_t c = matchClose(toks, k);
        names.push_back(joinWords(words(toks, k + 1, c), ""));
        k = c + 1;
      } else {
        names.push_back(toks[k++].text);
      }
    }
  }
  size_t k = colon + 1;
  std::vector<SortId> arity;
  while (k < e && toks[k].text != "->" && toks[k].text != "{") arity.push_back(sortByName(toks[k++]));
  SortId co = boolSort();
  if (!pred) {
    if (k >= e || toks[k].text != "->") throw tokError(toks[b], "missing '->' in operator declaration");
    ++k;
    if (k >= e) throw tokError(toks[b], "missing coarity");
    co = sortByName(toks[k++]);
  }
  Op proto;
  proto.arity = arity;
  proto.coarity = co;
  std::string idName;
  bool hasId = false;
  if (k < e && toks[k].text == "{") {
    size_t c = matchClose(toks, k);
    for (size_t a = k + 1; a < c; ++a) {
      const std::string& x = toks[a].text;
      if (x == "constr") proto.constr = true;
      else if (x == "assoc") proto.assoc = true;
      else if (x == "comm") proto.comm = true;
      else if (x == "id:" || x == "idr:") {
        hasId = true;
        if (a + 1 < c) idName = toks[++a].text;
      } else if (x.rfind("id:", 0) == 0) {
        hasId = true;
        idName = x.substr(3);
      } else if (x == "prec:") {
        if (a + 1 < c) proto.prec = std::stoi(toks[++a].text), proto.precGiven = true;
      } else if (x == "l-assoc" || x == "r-assoc" || x == "strat:" || x == "memo" || x == "idem") {
        // accepted, no effect
      } else {
        throw tokError(toks[a], "unknown operator attribute " + x);
      }
    }
    k = c + 1;
  }
  if (k != e) throw tokError(toks[k], "unexpected token in operator declaration");
  for (auto& n : names) {
    Op p = proto;
    p.name = n;
    if (!p.precGiven) p.prec = defaultPrec(n, p.arity.size());
    if (hasId) {
      const Op* id = nullptr;
      for (auto* o : m_.ops)
        if (o->name == idName && o->arity.empty() && (!id || m_.leq(o->coarity, co))) id = o;
      if (!id) throw tokError(toks[b], "unknown identity " + idName);
      p.id = id;
    }
    m_.addOp(internOp(p));
  }
  dirty_ = true;
}

void DeclProcessor::statement(const std::vector<Token>& toks, size_t& i) {
  const Token& t0 = toks[i];
  const std::string& kw = t0.text;
  static const std::set<std::string> imports{"pr", "protecting", "ex", "extending", "inc", "including",
                                             "us", "using"};
  if (imports.count(kw)) {
    size_t k = i + 1;
    expect(toks, k, "(");
    auto e = parseModExp(toks, k);
    expect(toks, k, ")");
    auto mod = reg_.elaborate(e, env_);
    m_.import(*mod);
    if (importPrincipal < 0 && mod->principal >= 0) importPrincipal = mod->principal;
    dirty_ = true;
    i = k;
    return;
  }
  if (kw == "[") {
    size_t c = matchClose(toks, i);
    std::vector<std::vector<SortId>> layers(1);
    auto flush = [&] {
      for (size_t a = 0; a + 1 < layers.size(); ++a)
        for (SortId x : layers[a])
          for (SortId y : layers[a + 1]) m_.addSubsort(x, y);
      layers.assign(1, {});
    };
    for (size_t k = i + 1; k < c; ++k) {
      const std::string& x = toks[k].text;
      if (x == "<") layers.emplace_back();
      else if (x == ",") flush();
      else {
        SortId s = internSort(x);
        m_.addSort(s);
        layers.back().push_back(s);
        if (ownPrincipal < 0) ownPrincipal = s;
      }
    }
    flush();
    dirty_ = true;
    i = c + 1;
    return;
  }
  size_t e = findDot(toks, i);
  if (kw == "op" || kw == "ops" || kw == "pred" || kw == "preds" || kw == "bop" || kw == "bops") {
    opDecl(toks, i + 1, e, kw[0] == 'p', kw.back() == 's');
  } else if (kw == "var" || kw == "vars") {
    size_t colon = i + 1;
    while (colon < e && toks[colon].text != ":") ++colon;
    if (colon + 2 != e) throw tokError(t0, "bad variable declaration");
    SortId s = sortByName(toks[colon + 1]);
    for (size_t k = i + 1; k < colon; ++k) m_.addVar(toks[k].text, s);
    dirty_ = true;
  } else if (kw == "sort" || kw == "sorts") {
    for (size_t k = i + 1; k < e; ++k) {
      m_.addSort(internSort(toks[k].text));
      if (ownPrincipal < 0) ownPrincipal = internSort(toks[k].text);
    }
    dirty_ = true;
  } else if (kw == "eq" || kw == "ceq" || kw == "cq" || kw == "tr" || kw == "ctr" || kw == "trans" ||
             kw == "ctrans" || kw == "rl" || kw == "crl") {
    Rule r = parseRuleWords(parser(), words(toks, i + 1, e), kw, true, t0.line);
    r.origin = m_.name;
    r.lemma = lemmaModule;
    m_.addRule(r);
    if (r.trans) m_.hasRwl = true;
    dirty_ = true;
  } else {
    throw tokError(t0, "unexpected '" + kw + "' in module body");
  }
  i = e + 1;
}

// ---------------------------------------------------------------- registry

namespace {

const char* kBoolSource = R"(
  op _xor_ : Bool Bool -> Bool {assoc comm prec: 57} .
  op _or_ : Bool Bool -> Bool {assoc comm prec: 59} .
  op _implies_ : Bool Bool -> Bool {prec: 61} .
  op _iff_ : Bool Bool -> Bool {assoc comm prec: 63} .
  vars A B C : Bool .
  eq not A = A xor true .
  eq false and A = false .
  eq true and A = A .
  eq A and A = A .
  eq A xor A = false .
  eq false xor A = A .
  eq A and (B xor C) = (A and B) xor (A and C) .
  eq A or B = (A and B) xor A xor B .
  eq A implies B = (A and B) xor A xor true .
  eq A iff B = A xor B xor true .
)";

bool endsWithLem(const std::string& n) {
  if (n.size() < 3) return false;
  std::string t = n.substr(n.size() - 3);
  for (auto& c : t) c = (char)std::tolower((unsigned char)c);
  return t == "lem";
}

const Op* searchOp(const std::string& name, size_t n, Builtin b) {
  Op p;
  p.name = name;
  p.arity.assign(n, kUniversal);
  p.coarity = boolSort();
  p.prec = 51;
  p.precGiven = true;
  p.builtin = b;
  return internOp(p);
}

}  // namespace

Registry::Registry() {
  // BOOL
  {
    auto m = std::make_shared<Module>();
    m->name = "BOOL";
    m->addSort(boolSort());
    for (auto* o : {trueOp(), falseOp(), notOp(), andOp(), eqOp(), eqeqOp(), ifOp()}) m->addOp(o);
    m->principal = boolSort();
    DeclProcessor dp(*this, *m);
    auto lx = lex(kBoolSource);
    for (size_t i = 0; i < lx.tokens.size();) dp.statement(lx.tokens, i);
    m->finalize();
    cache_["BOOL"] = m;
  }
  // TRIV
  {
    auto m = std::make_shared<Module>();
    m->name = "TRIV";
    m->import(*cache_["BOOL"]);
    m->addSort(internSort("Elt"));
    m->principal = internSort("Elt");
    m->finalize();
    cache_["TRIV"] = m;
  }
  // NAT: natural number literals only
  {
    auto m = std::make_shared<Module>();
    m->name = "NAT";
    m->import(*cache_["BOOL"]);
    m->addSort(m->natSort());
    m->principal = m->natSort();
    m->hasNat = true;
    m->finalize();
    cache_["NAT"] = m;
  }
  // RWL: the search predicates
  {
    auto m = std::make_shared<Module>();
    m->name = "RWL";
    m->import(*cache_["BOOL"]);
    SortId info = internSort("Info");
    m->addSort(info);
    m->addOp(searchOp("_=(*,1)=>+_if_suchThat_{_}", 5, Builtin::SearchStep));
    m->addOp(searchOp("_=(1,1)=>+_", 2, Builtin::SearchOne));
    m->addOp(searchOp("_=(*,*)=>*_suchThat_", 3, Builtin::SearchReach));
    m->finalize();
    cache_["RWL"] = m;
  }
}

void Registry::define(const ModuleDecl& d) {
  static const std::set<std::string> builtins{"BOOL", "TRIV", "NAT", "RWL"};
  if (builtins.count(d.name)) throw CafeError("cannot redefine builtin module " + d.name);
  decls_[d.name] = d;
  // drop everything cached, since other modules may import this one
  for (auto it = cache_.begin(); it != cache_.end();) {
    if (builtins.count(it->first)) ++it;
    else it = cache_.erase(it);
  }
}

bool Registry::has(const std::string& name) const { return decls_.count(name) || cache_.count(name); }

ModuleP Registry::get(const std::string& name) {
  if (auto it = cache_.find(name); it != cache_.end()) return it->second;
  auto d = decls_.find(name);
  if (d == decls_.end()) throw CafeError("unknown module " + name);
  if (std::find(stack_.begin(), stack_.end(), name) != stack_.end())
    throw CafeError("module " + name + " imports itself");
  stack_.push_back(name);
  ModuleP m;
  try {
    m = elabDecl(d->second);
  } catch (...) {
    stack_.pop_back();
    throw;
  }
  stack_.pop_back();
  cache_[name] = m;
  return m;
}

ModuleP Registry::elabDecl(const ModuleDecl& d) {
  if (d.alias) {
    auto base = elaborate(d.alias);
    auto m = std::make_shared<Module>(*base);
    m->name = d.name;
    return m;
  }
  auto m = std::make_shared<Module>();
  m->name = d.name;
  m->import(*get("BOOL"));
  m->import(*get("RWL"));
  Env env;
  std::set<SortId> boolSorts(m->sorts.begin(), m->sorts.end());
  std::set<const Op*> boolOps(m->ops.begin(), m->ops.end());
  SortId paramPrincipal = -1;
  for (auto& [pname, pexp] : d.params) {
    auto th = elaborate(pexp, env);
    m->import(*th);
    Param p;
    p.name = pname;
    for (SortId s : th->sorts)
      if (!boolSorts.count(s)) p.sorts.push_back(s);
    for (auto* o : th->ops)
      if (!boolOps.count(o)) p.ops.push_back(o);
    p.principal = th->principal;
    if (paramPrincipal < 0) paramPrincipal = th->principal;
    // a parameter shadows any parameter of the same name brought in by the theory
    m->params.erase(std::remove_if(m->params.begin(), m->params.end(),
                                   [&](const Param& q) { return q.name == pname; }),
                    m->params.end());
    m->params.push_back(p);
    env[pname] = th;
  }
  DeclProcessor dp(*this, *m, env);
  dp.lemmaModule = endsWithLem(d.name);
  for (size_t i = 0; i < d.body.size();) dp.statement(d.body, i);
  m->principal = dp.ownPrincipal >= 0 ? dp.ownPrincipal : paramPrincipal >= 0 ? paramPrincipal : dp.importPrincipal;
  m->finalize();
  return m;
}

ModuleP Registry::elaborate(const ModExpP& e, const Env& env) {
  switch (e->kind) {
    case ModExp::Name: {
      if (auto it = env.find(e->name); it != env.end()) return it->second;
      return get(e->name);
    }
    case ModExp::Sum: {
      auto m = std::make_shared<Module>();
      m->name = e->text();
      for (auto& s : e->subs) {
        auto x = elaborate(s, env);
        m->import(*x);
        if (m->principal < 0) m->principal = x->principal;
      }
      m->finalize();
      return m;
    }
    case ModExp::Rename: {
      auto base = elaborate(e->subs[0], env);
      RenameSpec spec;
      for (auto& mi : e->maps) {
        if (mi.kind == MapItem::Sort) {
          SortId from = internSort(mi.from);
          if (!base->hasSort(from)) throw CafeError("renaming: unknown sort " + mi.from);
          spec.sorts[from] = internSort(mi.to);
        } else if (mi.kind == MapItem::Op) {
          spec.opNames[mi.from] = mi.to;
        } else {
          throw CafeError("renaming: term maps are only allowed in views");
        }
      }
      return renameModule(*base, spec, 0, e->text());
    }
    case ModExp::Inst: {
      auto base = elaborate(e->subs[0], env);
      std::vector<ModuleP> args;
      for (size_t k = 1; k < e->subs.size(); ++k) args.push_back(elaborate(e->subs[k], env));
      auto m = instantiate(base, args, e->argMaps);
      std::const_pointer_cast<Module>(m)->name = e->text();
      return m;
    }
  }
  throw CafeError("bad module expression");
}

namespace {

// rewrites every subterm matching lhs into rhs, bottom up
TermP rewriteAll(const Module& m, const TermP& t, const TermP& lhs, const TermP& rhs) {
  if (t->isVar()) return t;
  std::vector<TermP> args;
  for (auto& a : t->args) args.push_back(rewriteAll(m, a, lhs, rhs));
  TermP u = m.mk(t->op, std::move(args));
  Matcher mt(m);
  Subst s;
  TermP out = u;
  mt.match(lhs, u, s, [&] {
    out = applySubst(m, rhs, s);
    return true;
  });
  return out;
}

}  // namespace

ModuleP Registry::instantiate(const ModuleP& base, const std::vector<ModuleP>& args,
                              const std::vector<std::vector<MapItem>>& maps) {
  if (args.size() > base->params.size())
    throw CafeError("module " + base->name + " takes " + std::to_string(base->params.size()) + " parameter(s)");
  RenameSpec spec;
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> termMaps;
  std::vector<size_t> termMapArg;
  for (size_t k = 0; k < args.size(); ++k) {
    const Param& p = base->params[k];
    const Module& a = *args[k];
    std::map<std::string, std::string> sortMap, opMap;
    for (auto& mi : maps[k]) {
      if (mi.kind == MapItem::Sort) sortMap[mi.from] = mi.to;
      else if (mi.kind == MapItem::Op) opMap[mi.from] = mi.to;
      else {
        termMaps.emplace_back(mi.fromToks, mi.toToks);
        termMapArg.push_back(k);
      }
    }
    for (SortId s : p.sorts) {
      if (spec.sorts.count(s)) continue;
      SortId target = -1;
      if (auto it = sortMap.find(sortName(s)); it != sortMap.end()) {
        target = internSort(it->second);
        if (!a.hasSort(target)) throw CafeError("view: sort " + it->second + " not in " + a.name);
      } else if (a.hasSort(s)) {
        target = s;
      } else if (s == p.principal && a.principal >= 0) {
        target = a.principal;
      } else {
        throw CafeError("view: no image for sort " + sortName(s) + " of parameter " + p.name);
      }
      spec.sorts[s] = target;
    }
    for (const Op* o : p.ops) {
      if (auto it = opMap.find(o->name); it != opMap.end()) spec.ops[o] = it->second;
    }
  }
  std::string inner;
  for (auto& a : args) inner += (inner.empty() ? "" : ", ") + a->name;
  auto renamed = renameModule(*base, spec, args.size(), base->name + "(" + inner + ")");
  auto out = std::make_shared<Module>();
  out->name = renamed->name;
  out->import(*renamed);
  for (auto& a : args) out->import(*a);
  out->principal = renamed->principal;
  out->finalize();
  if (!termMaps.empty()) {
    TermParser bp(*base);
    TermParser op(*out);
    Renamer R{spec, {}};
    std::vector<Rule> derived;
    for (auto& [from, to] : termMaps) {
      VarScope s1, s2;
      bp.scanVars(from, s1);
      TermP lhs = R.term(bp.parse(from, s1), *out);
      op.scanVars(to, s2);
      // variables of the target are the renamed variables of the source
      for (auto& [n, srt] : s1) s2.emplace(n, R.sort(srt));
      TermP rhs = op.parse(to, s2);
      Rule d;
      d.lhs = lhs;
      d.rhs = rhs;
      d.origin = out->name;
      derived.push_back(d);
      for (auto* rules : {&out->eqs, &out->trs})
        for (auto& r : *rules) {
          r.lhs = rewriteAll(*out, r.lhs, lhs, rhs);
          r.rhs = rewriteAll(*out, r.rhs, lhs, rhs);
          if (r.cond) r.cond = rewriteAll(*out, r.cond, lhs, rhs);
        }
    }
    auto fresh = std::make_shared<Module>();
    fresh->name = out->name;
    for (SortId s : out->sorts) fresh->addSort(s);
    for (auto& e : out->subsorts) fresh->addSubsort(e.first, e.second);
    for (auto* o : out->ops) fresh->addOp(o);
    fresh->params = out->params;
    fresh->principal = out->principal;
    fresh->hasNat = out->hasNat;
    fresh->hasRwl = out->hasRwl;
    for (auto& r : derived) fresh->addRule(r);
    for (auto& r : out->eqs) fresh->addRule(r);
    for (auto& r : out->trs) fresh->addRule(r);
    fresh->finalize();
    return fresh;
  }
  return out;
}

ModuleDecl parseModuleDecl(const std::vector<Token>& toks, size_t& i) {
  ModuleDecl d;
  const Token& kw = toks[i++];
  if (i >= toks.size()) throw tokError(kw, "module name expected");
  d.name = toks[i++].text;
  if (i < toks.size() && toks[i].text == "(") {
    ++i;
    for (;;) {
      if (i >= toks.size()) throw tokError(kw, "unterminated parameter list");
      std::string pn = toks[i++].text;
      expect(toks, i, "::");
      d.params.emplace_back(pn, parseModExp(toks, i));
      if (i < toks.size() && toks[i].text == ",") { ++i; continue; }
      break;
    }
    expect(toks, i, ")");
  }
  if (i >= toks.size() || toks[i].text != "{") throw tokError(at(toks, i), "'{' expected after module header");
  size_t c = matchClose(toks, i);
  d.body.assign(toks.begin() + (long)i + 1, toks.begin() + (long)c);
  i = c + 1;
  return d;
}

}  // namespace cafe
