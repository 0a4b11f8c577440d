#pragma once
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cafe/elab.hpp"
#include "cafe/ptcalc.hpp"
#include "cafe/rewrite.hpp"

namespace cafe {

struct Options {
  Budget budget;
  bool trace = false;
  bool check = false;        // enforce expect directives
  bool failFast = false;
  bool invariants = false;   // check proof tree invariants after every command
};

class Session;
// called after each command of run(); tests use it to inspect intermediate states
using CommandHook = std::function<void(Session&)>;

// raised by the command scanner when the input ends inside a command
struct Incomplete : CafeError {
  using CafeError::CafeError;
};

struct CommandResult {
  std::vector<std::string> artifacts;
  std::vector<std::string> notes;
};

class Session {
 public:
  Session(Options o, std::ostream& out, std::ostream& err);

  // runs a whole source text; false when a hard error stopped it
  bool run(const std::string& src, const std::string& file = "<input>");
  // executes the complete commands at the front of buf and erases them
  void feed(std::string& buf);
  int exitCode() const;
  void summary();

  Options opts;
  Registry registry;
  int errors = 0, expectFailures = 0, expectPasses = 0, commands = 0, reductions = 0;
  int goalsStarted = 0;   // :goal commands run so far
  bool quit = false;
  bool stop = false;   // fail-fast tripped
  std::vector<std::string> lastArtifacts;
  std::string lastError;
  long long lastVisited = 0;
  std::vector<std::string> invariantFailures;
  CommandHook afterCommand;

  ProofTree* proof() { return proof_.get(); }
  ModuleP current();

 private:
  size_t scan(const std::vector<Token>& toks, size_t i) const;
  CommandResult exec(const std::vector<Token>& toks, size_t b, size_t e);
  CommandResult reduceCmd(const std::vector<Token>& toks, size_t b, size_t e, bool inGoal);
  CommandResult ptcalc(const std::vector<Token>& toks, size_t b, size_t e);
  std::vector<Rule> parseSentences(const std::vector<Token>& toks, size_t b, size_t e, const Module& m);
  Tactic parseInit(const std::vector<Token>& toks, size_t b, size_t e, const std::string& name);
  const TermParser& parserFor(const ModuleP& m);
  void emit(const CommandResult& r);

  std::ostream& out_;
  std::ostream& err_;
  ModuleP selected_;
  std::shared_ptr<Module> scratch_;
  std::unique_ptr<DeclProcessor> scratchDecl_;
  std::unique_ptr<ProofTree> proof_;
  std::map<std::string, Tactic> tactics_;
  std::map<const Module*, std::pair<ModuleP, std::unique_ptr<TermParser>>> parsers_;
};

}  // namespace cafe
