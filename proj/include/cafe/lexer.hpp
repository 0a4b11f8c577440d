#pragma once
#include <string>
#include <vector>

namespace cafe {

struct Token {
  std::string text;
  int line = 0;
  int col = 0;
  size_t pos = 0;   // byte offset of the first character
};

// comment lines of the form `--> expect: ...` and friends
struct Directive {
  enum Kind { Expect, BlockBegin, BlockLine, BlockEnd } kind;
  std::string text;
  int line = 0;
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<Directive> directives;
};

LexResult lex(const std::string& src);
std::vector<std::string> lexWords(const std::string& src);

}  // namespace cafe
