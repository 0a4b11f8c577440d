#pragma once
#include <fstream>
#include <sstream>
#include <string>

#include "cafe/lexer.hpp"
#include "cafe/parser.hpp"
#include "cafe/session.hpp"

namespace tst {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus(const std::string& name) { return slurp(std::string(CORPUS_DIR) + "/" + name + ".cafe"); }

// a session writing into string buffers
struct Env {
  std::ostringstream out, err;
  cafe::Session s;
  explicit Env(cafe::Options o = {}) : s(o, out, err) {}
  bool run(const std::string& src) { return s.run(src, "<test>"); }
  // runs one command and returns its last artifact
  std::string last(const std::string& cmd) {
    s.run(cmd, "<test>");
    return s.lastArtifacts.empty() ? "" : s.lastArtifacts.back();
  }
  cafe::ModuleP mod(const std::string& name) { return s.registry.get(name); }
};

inline cafe::TermP parseIn(const cafe::Module& m, const std::string& text) {
  cafe::TermParser p(m);
  auto ws = cafe::lexWords(text);
  cafe::VarScope scope;
  p.scanVars(ws, scope);
  return p.parse(ws, scope);
}

}  // namespace tst
