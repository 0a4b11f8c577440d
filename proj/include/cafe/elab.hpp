#pragma once
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cafe/lexer.hpp"
#include "cafe/module.hpp"
#include "cafe/parser.hpp"

namespace cafe {

struct MapItem {
  enum Kind { Sort, Op, TermOp } kind = Sort;
  std::string from, to;
  std::vector<std::string> fromToks, toToks;
};

struct ModExp;
using ModExpP = std::shared_ptr<ModExp>;
struct ModExp {
  enum Kind { Name, Inst, Rename, Sum } kind = Name;
  std::string name;
  std::vector<ModExpP> subs;                  // Inst: base then arguments; Sum: summands; Rename: base
  std::vector<std::vector<MapItem>> argMaps;  // Inst: view maps per argument
  std::vector<MapItem> maps;                  // Rename
  std::string text() const;
};

ModExpP parseModExp(const std::vector<Token>& toks, size_t& i);
std::vector<MapItem> parseMaps(const std::vector<Token>& toks, size_t& i);   // after '{', consumes '}'

struct ModuleDecl {
  std::string name;
  std::vector<std::pair<std::string, ModExpP>> params;
  std::vector<Token> body;
  ModExpP alias;   // `make N (E)`
};

// parses `mod[!*] Name (params) { body }` starting at the keyword
ModuleDecl parseModuleDecl(const std::vector<Token>& toks, size_t& i);

CafeError tokError(const Token& t, const std::string& msg);
size_t findDot(const std::vector<Token>& toks, size_t i);
size_t matchClose(const std::vector<Token>& toks, size_t open);
std::vector<std::string> words(const std::vector<Token>& toks, size_t from, size_t to);

class Registry {
 public:
  using Env = std::map<std::string, ModuleP>;
  Registry();
  void define(const ModuleDecl& d);
  bool has(const std::string& name) const;
  ModuleP get(const std::string& name);
  ModuleP elaborate(const ModExpP& e, const Env& env = {});
  ModuleP boolModule() { return get("BOOL"); }

 private:
  ModuleP elabDecl(const ModuleDecl& d);
  ModuleP instantiate(const ModuleP& base, const std::vector<ModuleP>& args,
                      const std::vector<std::vector<MapItem>>& maps);
  std::map<std::string, ModuleDecl> decls_;
  std::map<std::string, ModuleP> cache_;
  std::vector<std::string> stack_;
};

// renames sorts and operators of a module; the first `dropParams` parameters are consumed
struct RenameSpec {
  std::map<SortId, SortId> sorts;
  std::map<const Op*, std::string> ops;
  std::map<std::string, std::string> opNames;
};
ModuleP renameModule(const Module& m, const RenameSpec& spec, size_t dropParams, const std::string& newName);

// parses `lhs = rhs [if cond]` (or `=>` for transitions) from the words after the keyword
Rule parseRuleWords(const TermParser& p, const std::vector<std::string>& ws, const std::string& kw,
                    bool checkVars, int line);
std::vector<TermP> searchBoundVars(const TermP& t);

// applies module-level declarations to a module under construction
class DeclProcessor {
 public:
  DeclProcessor(Registry& reg, Module& m, Registry::Env env = {});
  static bool isDeclKeyword(const std::string& kw);
  void statement(const std::vector<Token>& toks, size_t& i);
  const TermParser& parser();
  bool lemmaModule = false;
  SortId ownPrincipal = -1;
  SortId importPrincipal = -1;

 private:
  void opDecl(const std::vector<Token>& toks, size_t b, size_t e, bool pred, bool many);
  SortId sortByName(const Token& t);
  Registry& reg_;
  Module& m_;
  Registry::Env env_;
  std::unique_ptr<TermParser> parser_;
  bool dirty_ = true;
};

}  // namespace cafe
