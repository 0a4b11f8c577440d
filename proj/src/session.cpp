#include "cafe/session.hpp"

#include <ostream>
#include <set>

namespace cafe {

namespace {

bool isOpen(const std::string& s) { return s == "(" || s == "[" || s == "{"; }
bool isClose(const std::string& s) { return s == ")" || s == "]" || s == "}"; }

size_t closeOf(const std::vector<Token>& toks, size_t open) {
  int d = 0;
  for (size_t k = open; k < toks.size(); ++k) {
    if (isOpen(toks[k].text)) ++d;
    else if (isClose(toks[k].text) && --d == 0) return k;
  }
  throw Incomplete("unbalanced '" + toks[open].text + "'");
}

size_t dotOf(const std::vector<Token>& toks, size_t i) {
  int d = 0;
  for (size_t k = i; k < toks.size(); ++k) {
    const auto& x = toks[k].text;
    if (isOpen(x)) ++d;
    else if (isClose(x)) --d;
    else if (x == "." && d <= 0) return k;
  }
  throw Incomplete("missing '.'");
}

size_t need(const std::vector<Token>& toks, size_t i) {
  if (i >= toks.size()) throw Incomplete("input ends inside a command");
  return i;
}

bool isModuleKw(const std::string& s) {
  return s == "mod" || s == "mod!" || s == "mod*" || s == "module" || s == "module!" || s == "module*";
}

std::string joinWords(const std::vector<std::string>& ws) {
  std::string s;
  for (auto& w : ws) s += (s.empty() ? "" : " ") + w;
  return s;
}

}  // namespace

Session::Session(Options o, std::ostream& out, std::ostream& err) : opts(o), out_(out), err_(err) {}

int Session::exitCode() const {
  if (errors) return 2;
  if (expectFailures) return 1;
  return 0;
}

void Session::summary() {
  out_ << "-- summary: " << commands << " commands, " << reductions << " reductions, " << expectPasses
       << " expectations passed, " << expectFailures << " failed, " << errors << " errors\n";
}

ModuleP Session::current() {
  if (scratch_) {
    if (!scratch_->finalized()) scratch_->finalize();
    return scratch_;
  }
  return selected_;
}

const TermParser& Session::parserFor(const ModuleP& m) {
  if (scratch_ && m.get() == scratch_.get()) return scratchDecl_->parser();
  auto it = parsers_.find(m.get());
  if (it == parsers_.end() || it->second.first != m)
    it = parsers_.insert_or_assign(m.get(), std::make_pair(m, std::make_unique<TermParser>(*m))).first;
  return *it->second.second;
}

// extent of the command starting at i (exclusive end)
size_t Session::scan(const std::vector<Token>& toks, size_t i) const {
  const std::string& kw = toks[i].text;
  if (isModuleKw(kw)) {
    size_t k = i + 1;
    while (need(toks, k) < toks.size() && toks[k].text != "{") ++k;
    return closeOf(toks, k) + 1;
  }
  if (kw == "make") {
    size_t k = need(toks, i + 2);
    if (toks[k].text != "(") throw CafeError("'(' expected after make " + toks[i + 1].text);
    size_t e = closeOf(toks, k) + 1;
    if (e < toks.size() && toks[e].text == ".") ++e;
    return e;
  }
  if (kw == "close" || kw == "eof" || kw == "quit" || kw == "q") return i + 1;
  if (kw == ":show" || kw == ":describe" || kw == ":select") {
    size_t e = need(toks, i + 1) + 1;
    if (e < toks.size() && toks[e].text == ".") ++e;
    return e;
  }
  if (kw == ":goal") {
    size_t k = need(toks, i + 1);
    return closeOf(toks, k) + 1;
  }
  if (kw == ":apply" || kw == ":set") {
    size_t k = need(toks, i + 1);
    size_t e = closeOf(toks, k) + 1;
    if (e < toks.size() && toks[e].text == ".") ++e;
    return e;
  }
  if (kw == ":def") {
    size_t k = need(toks, i + 3);
    const std::string& how = toks[k].text;
    if (how == ":csp" || how == ":ctf") return closeOf(toks, need(toks, k + 1)) + 1;
    if (how == ":init") {
      int d = 0;
      for (size_t j = k + 1; j < toks.size(); ++j) {
        if (isOpen(toks[j].text)) ++d;
        else if (isClose(toks[j].text)) --d;
        else if (d == 0 && toks[j].text == "by") return closeOf(toks, need(toks, j + 1)) + 1;
      }
      throw Incomplete("':init' without 'by'");
    }
    return k + 1;
  }
  static const std::set<std::string> imports{"pr", "protecting", "ex", "extending", "inc", "including",
                                             "us", "using"};
  if (imports.count(kw)) return closeOf(toks, need(toks, i + 1)) + 1;
  if (kw == "[") return closeOf(toks, i) + 1;
  return dotOf(toks, i) + 1;
}

void Session::emit(const CommandResult& r) {
  for (auto& n : r.notes) out_ << "-- " << n << "\n";
  for (auto& a : r.artifacts) out_ << a << "\n";
}

bool Session::run(const std::string& src, const std::string& file) {
  LexResult lx = lex(src);
  const auto& toks = lx.tokens;
  size_t di = 0;
  size_t i = 0;
  while (i < toks.size() && !quit && !stop) {
    int line = toks[i].line;
    // directives written before this command
    std::optional<std::string> expectOne;
    std::optional<std::vector<std::string>> expectBlock;
    int expectLine = 0;
    while (di < lx.directives.size() && lx.directives[di].line < line) {
      const Directive& d = lx.directives[di++];
      expectLine = d.line;
      switch (d.kind) {
        case Directive::Expect:
          expectOne = d.text;
          expectBlock.reset();
          break;
        case Directive::BlockBegin:
          expectBlock.emplace();
          expectOne.reset();
          break;
        case Directive::BlockLine:
          if (expectBlock) expectBlock->push_back(d.text);
          break;
        case Directive::BlockEnd:
          break;
      }
    }
    size_t e;
    try {
      e = scan(toks, i);
    } catch (const CafeError& ex) {
      err_ << file << ":" << line << ": error: " << ex.what() << "\n";
      ++errors;
      return false;
    }
    ++commands;
    CommandResult res;
    bool failed = false;
    try {
      res = exec(toks, i, e);
      if (opts.invariants && proof_) {
        std::string why;
        if (!proof_->checkInvariants(&why)) {
          invariantFailures.push_back(file + ":" + std::to_string(line) + ": " + why);
          throw CafeError("proof invariant violated: " + why);
        }
      }
    } catch (const BudgetExceeded& ex) {
      failed = true;
      lastError = "BudgetExceeded(" + ex.kind + ")";
      res.artifacts = {"error: " + lastError};
      res.notes.push_back(ex.what());
    } catch (const CafeError& ex) {
      failed = true;
      lastError = ex.what();
      res.artifacts = {"error: " + lastError};
    }
    lastArtifacts = res.artifacts;
    bool expected = expectOne || expectBlock;
    bool pass = true;
    std::string want, got;
    if (expectOne) {
      want = *expectOne;
      got = res.artifacts.empty() ? "" : res.artifacts.back();
      pass = want == got;
    } else if (expectBlock) {
      pass = *expectBlock == res.artifacts;
      for (auto& l : *expectBlock) want += "\n    " + l;
      for (auto& l : res.artifacts) got += "\n    " + l;
    }
    emit(res);
    if (failed && !(expected && pass)) {
      err_ << file << ":" << line << ": error: " << lastError << "\n";
      ++errors;
      if (opts.failFast) stop = true;
      return false;
    }
    if (expected && opts.check) {
      if (pass) {
        ++expectPasses;
      } else {
        ++expectFailures;
        err_ << file << ":" << expectLine << ": expectation failed\n  expected: " << want << "\n  actual:   " << got
             << "\n";
        if (opts.failFast) stop = true;
      }
    }
    if (afterCommand) afterCommand(*this);
    i = e;
  }
  return !stop;
}

void Session::feed(std::string& buf) {
  LexResult lx = lex(buf);
  const auto& toks = lx.tokens;
  size_t i = 0;
  while (i < toks.size() && !quit) {
    size_t e;
    try {
      e = scan(toks, i);
    } catch (const Incomplete&) {
      buf.erase(0, toks[i].pos);
      return;
    } catch (const CafeError& ex) {
      err_ << "error: " << ex.what() << "\n";
      buf.clear();
      return;
    }
    ++commands;
    try {
      emit(exec(toks, i, e));
    } catch (const BudgetExceeded& ex) {
      err_ << "error: BudgetExceeded(" << ex.kind << "): " << ex.what() << "\n";
    } catch (const CafeError& ex) {
      err_ << "error: " << ex.what() << "\n";
    }
    i = e;
  }
  buf.clear();
}

std::vector<Rule> Session::parseSentences(const std::vector<Token>& toks, size_t b, size_t e, const Module& m) {
  std::vector<Rule> out;
  const TermParser* p;
  std::unique_ptr<TermParser> own;
  if (scratch_ && &m == scratch_.get()) p = &scratchDecl_->parser();
  else own = std::make_unique<TermParser>(m), p = own.get();
  size_t i = b;
  while (i < e) {
    const std::string& kw = toks[i].text;
    if (kw != "eq" && kw != "ceq" && kw != "cq") throw tokError(toks[i], "equation expected, got '" + kw + "'");
    size_t d = findDot(toks, i);
    if (d >= e) throw tokError(toks[i], "missing '.'");
    Rule r = parseRuleWords(*p, words(toks, i + 1, d), kw, false, toks[i].line);
    r.origin = "goal";
    out.push_back(r);
    i = d + 1;
  }
  return out;
}

CommandResult Session::exec(const std::vector<Token>& toks, size_t b, size_t e) {
  CommandResult res;
  const std::string& kw = toks[b].text;
  if (isModuleKw(kw)) {
    size_t i = b;
    ModuleDecl d = parseModuleDecl(toks, i);
    registry.define(d);
    selected_ = registry.get(d.name);  // the newest module becomes current
    res.notes.push_back("defined " + d.name);
    return res;
  }
  if (kw == "make") {
    ModuleDecl d;
    d.name = toks[b + 1].text;
    size_t i = b + 3;
    d.alias = parseModExp(toks, i);
    registry.define(d);
    selected_ = registry.get(d.name);  // the newest module becomes current
    res.notes.push_back("defined " + d.name);
    return res;
  }
  if (kw == "open" || kw == "select") {
    size_t i = b + 1;
    auto me = parseModExp(toks, i);
    if (i != e - 1) throw tokError(toks[std::min(i, e - 1)], "unexpected token after module expression");
    ModuleP m = registry.elaborate(me);
    if (kw == "select") {
      selected_ = m;
      res.notes.push_back("selected " + m->name);
    } else {
      if (scratch_) throw tokError(toks[b], "a module is already open");
      scratch_ = std::make_shared<Module>(*m);
      scratch_->name = "%" + m->name;
      scratchDecl_ = std::make_unique<DeclProcessor>(registry, *scratch_);
      res.notes.push_back("opening module " + m->name);
    }
    return res;
  }
  if (kw == "close") {
    if (!scratch_) throw tokError(toks[b], "no open module");
    scratch_.reset();
    scratchDecl_.reset();
    proof_.reset();
    tactics_.clear();
    return res;
  }
  if (kw == "eof" || kw == "quit" || kw == "q") {
    quit = true;
    return res;
  }
  if (kw == "red" || kw == "reduce") return reduceCmd(toks, b, e, false);
  if (kw == "parse") {
    size_t i = b + 1;
    ModuleP m;
    if (i < e && toks[i].text == "in") {
      ++i;
      m = registry.elaborate(parseModExp(toks, i));
      if (i >= e || toks[i].text != ":") throw tokError(toks[std::min(i, e - 1)], "':' expected");
      ++i;
    } else {
      m = current();
    }
    if (!m) throw tokError(toks[b], "no current module");
    auto ws = words(toks, i, e - 1);
    VarScope scope;
    const TermParser& p = parserFor(m);
    p.scanVars(ws, scope);
    TermP t = p.parse(ws, scope);
    res.artifacts.push_back(printTerm(t) + " : " + sortName(t->sort));
    return res;
  }
  if (kw == "check") {
    if (e - b < 4) throw tokError(toks[b], "usage: check sensible|regularity MODULE .");
    std::string what = toks[b + 1].text;
    size_t i = b + 2;
    ModuleP m = registry.elaborate(parseModExp(toks, i));
    SigReport rep = m->checkSignature();
    if (what == "sensible") res.artifacts.push_back(rep.sensible ? "sensible" : "not sensible");
    else if (what == "regular" || what == "regularity")
      res.artifacts.push_back(rep.regular ? "regular" : "not regular");
    else throw tokError(toks[b + 1], "unknown check " + what);
    for (auto& p : rep.problems) res.notes.push_back(p);
    return res;
  }
  if (!kw.empty() && kw[0] == ':') return ptcalc(toks, b, e);
  if (DeclProcessor::isDeclKeyword(kw)) {
    if (!scratch_) throw tokError(toks[b], "declarations need an open module");
    size_t i = b;
    scratchDecl_->statement(toks, i);
    return res;
  }
  throw tokError(toks[b], "unknown command '" + kw + "'");
}

CommandResult Session::reduceCmd(const std::vector<Token>& toks, size_t b, size_t e, bool inGoal) {
  CommandResult res;
  size_t i = b + 1;
  ModuleP m;
  if (!inGoal && i < e && toks[i].text == "in") {
    ++i;
    m = registry.elaborate(parseModExp(toks, i));
    if (i >= e || toks[i].text != ":") throw tokError(toks[std::min(i, e - 1)], "':' expected");
    ++i;
  } else if (inGoal && proof_ && proof_->target() >= 0) {
    m = proof_->context(proof_->target());
  } else {
    m = current();
  }
  if (!m) throw tokError(toks[b], "no current module");
  auto ws = words(toks, i, e - 1);
  VarScope scope;
  const TermParser& p = parserFor(m);
  p.scanVars(ws, scope);
  TermP t = p.parse(ws, scope);
  Reducer red(m, opts.budget);
  std::vector<std::string> printouts;
  red.printouts = &printouts;
  res.notes.push_back("reduce in " + m->name + " : " + printTerm(t, false));
  TermP r;
  if (opts.trace) {
    Trace tr;
    r = red.reduceTraced(t, tr);
    res.notes.push_back("oc-red sequence: " + tr.sequence());
    std::vector<std::string> lines;
    tr.lines(lines);
    for (auto& l : lines) res.notes.push_back("  " + l);
  } else {
    r = red.reduce(t);
  }
  ++reductions;
  lastVisited = red.lastVisited;
  res.artifacts = printouts;
  res.artifacts.push_back(printTerm(r));
  std::string info = "(" + sortName(r->sort) + ") rewrites: " + std::to_string(red.steps);
  if (red.lastVisited) info += ", states visited: " + std::to_string(red.lastVisited);
  res.notes.push_back(info);
  if (!red.lemmasUsed.empty()) {
    std::string l;
    for (auto& s : red.lemmasUsed) l += (l.empty() ? "" : ", ") + s;
    res.notes.push_back("assumed lemmas used: " + l);
  }
  return res;
}

Tactic Session::parseInit(const std::vector<Token>& toks, size_t b, size_t e, const std::string& name) {
  // b points just after :init
  Tactic t;
  t.kind = Tactic::Init;
  t.name = name;
  ModuleP m = current();
  size_t i = b;
  if (i < e && toks[i].text == "as") {
    t.asName = toks[i + 1].text;
    i += 2;
  }
  if (i < e && toks[i].text == "[") {
    size_t c = matchClose(toks, i);
    t.label = joinWords(words(toks, i + 1, c));
    i = c + 1;
  } else if (i < e && toks[i].text == "(") {
    size_t c = matchClose(toks, i);
    auto rs = parseSentences(toks, i + 1, c, *m);
    if (rs.size() != 1) throw tokError(toks[i], ":init takes one equation");
    t.inlineRule = rs[0];
    i = c + 1;
  } else {
    throw tokError(toks[std::min(i, e - 1)], "':init' needs [label] or (eq ... .)");
  }
  if (i >= e || toks[i].text != "by") throw tokError(toks[std::min(i, e - 1)], "'by' expected");
  ++i;
  if (i >= e || toks[i].text != "{") throw tokError(toks[std::min(i, e - 1)], "'{' expected");
  size_t c = matchClose(toks, i);
  const TermParser& p = parserFor(m);
  size_t k = i + 1;
  while (k < c) {
    size_t semi = k;
    while (semi < c && toks[semi].text != ";") ++semi;
    auto ws = words(toks, k, semi);
    if (ws.size() < 3 || ws[1] != "<-") throw tokError(toks[k], "substitution item 'V <- term' expected");
    VarScope scope;
    p.scanVars(ws, scope);
    TermP v = p.parse({ws[0]}, scope);
    if (!v->isVar()) throw tokError(toks[k], ws[0] + " is not a variable");
    TermP val = p.parse(std::vector<std::string>(ws.begin() + 2, ws.end()), scope);
    if (!m->leq(val->sort, v->sort)) throw tokError(toks[k], "sort mismatch binding " + ws[0]);
    t.subst.bind(v, val);
    k = semi + 1;
  }
  return t;
}

CommandResult Session::ptcalc(const std::vector<Token>& toks, size_t b, size_t e) {
  CommandResult res;
  const std::string& kw = toks[b].text;
  if (kw == ":goal") {
    ModuleP m = current();
    if (!m) throw tokError(toks[b], "no current module");
    size_t c = matchClose(toks, b + 1);
    auto stp = parseSentences(toks, b + 2, c, *m);
    // the proof keeps a snapshot of the open module
    ModuleP ctm = scratch_ ? std::make_shared<const Module>(*scratch_) : m;
    proof_ = std::make_unique<ProofTree>(ctm, stp, opts.budget);
    ++goalsStarted;
    res.notes.push_back("goal with " + std::to_string(stp.size()) + " sentence(s) in " + ctm->name);
    return res;
  }
  if (kw == ":def") {
    std::string name = toks[b + 1].text;
    if (toks[b + 2].text != "=") throw tokError(toks[b + 2], "'=' expected");
    const std::string& how = toks[b + 3].text;
    ModuleP m = current();
    if (!m) throw tokError(toks[b], "no current module");
    Tactic t;
    t.name = name;
    if (how == ":csp" || how == ":ctf") {
      size_t c = matchClose(toks, b + 4);
      auto eqs = parseSentences(toks, b + 5, c, *m);
      if (how == ":csp") {
        for (auto& r : eqs) t.cases.push_back({r});
      } else {
        if (eqs.size() != 1) throw tokError(toks[b + 3], ":ctf takes one equation");
        Rule pos = eqs[0];
        Rule neg;
        neg.origin = pos.origin;
        const TermP& l = pos.lhs;
        const TermP& r = pos.rhs;
        bool boolConst = !r->isVar() && (r->op == trueOp() || r->op == falseOp());
        if (m->leq(l->sort, boolSort()) && boolConst) {
          neg.lhs = l;
          neg.rhs = m->boolConst(r->op == falseOp());
        } else {
          neg.lhs = m->mk(eqOp(), {l, r});
          neg.rhs = m->boolConst(false);
        }
        t.cases = {{pos}, {neg}};
      }
    } else if (how == ":init") {
      t = parseInit(toks, b + 4, e, name);
    } else {
      throw tokError(toks[b + 3], "unknown tactic form " + how);
    }
    tactics_[name] = t;
    return res;
  }
  if (!proof_ && kw != ":red" && kw != ":set") throw tokError(toks[b], "no proof in progress");
  if (kw == ":apply") {
    size_t c = matchClose(toks, b + 1);
    auto seq = words(toks, b + 2, c);
    std::vector<std::string> notes;
    res.artifacts.push_back(proof_->apply(seq, tactics_, notes));
    res.notes = notes;
    return res;
  }
  if (kw == ":show" || kw == ":describe") {
    std::string what = toks[b + 1].text;
    if (what == "proof" && kw == ":show") {
      res.artifacts = proof_->showProof();
    } else if (what == "proof") {
      for (size_t g = 0; g < proof_->goals.size(); ++g) {
        auto d = proof_->describe((int)g);
        res.artifacts.insert(res.artifacts.end(), d.begin(), d.end());
      }
      if (!proof_->lemmas.empty()) {
        std::string l;
        for (auto& s : proof_->lemmas) l += (l.empty() ? "" : ", ") + s;
        res.artifacts.push_back("assumed lemmas: " + l);
      }
    } else if (what == "goal") {
      int t = proof_->target();
      if (t < 0) {
        res.artifacts.push_back("all goals discharged");
      } else {
        res.artifacts = proof_->describe(t);
        std::vector<std::string> red;
        ProofTree tmp = *proof_;
        tmp.discharge(t, &red);
        for (auto& r : red) res.artifacts.push_back("  reduces to: " + r);
      }
    } else {
      throw tokError(toks[b + 1], "unknown " + kw + " target " + what);
    }
    return res;
  }
  if (kw == ":select") {
    if (!proof_->select(toks[b + 1].text)) throw tokError(toks[b + 1], "cannot select goal " + toks[b + 1].text);
    return res;
  }
  if (kw == ":red") return reduceCmd(toks, b, e, true);
  if (kw == ":set") {
    auto ws = words(toks, b + 2, matchClose(toks, b + 1));
    std::vector<std::string> v;
    for (auto& w : ws)
      if (w != ",") v.push_back(w);
    if (v.size() != 2) throw tokError(toks[b], "usage: :set(option, value)");
    if (v[0] == "trace") opts.trace = v[1] == "on";
    else if (v[0] == "steps") opts.budget.maxSteps = std::stoll(v[1]);
    else if (v[0] == "nesting") opts.budget.maxNesting = std::stoi(v[1]);
    else if (v[0] == "states") opts.budget.maxStates = std::stoll(v[1]);
    else throw tokError(toks[b], "unknown option " + v[0]);
    if (proof_) proof_->budget = opts.budget;
    return res;
  }
  throw tokError(toks[b], "unknown command '" + kw + "'");
}

}  // namespace cafe
