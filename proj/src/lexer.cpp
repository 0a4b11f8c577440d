#include "cafe/lexer.hpp"

#include <cctype>

namespace cafe {

namespace {

bool reserved(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',' || c == ';';
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

LexResult lex(const std::string& src) {
  LexResult out;
  size_t i = 0, n = src.size();
  int line = 1, col = 1;
  bool inBlock = false;
  size_t lastEnd = std::string::npos;
  auto advance = [&](size_t k) {
    for (size_t j = 0; j < k && i < n; ++j, ++i) {
      if (src[i] == '\n') line++, col = 1;
      else col++;
    }
  };
  while (i < n) {
    char c = src[i];
    if (std::isspace((unsigned char)c)) { advance(1); continue; }
    if (reserved(c)) {
      out.tokens.push_back({std::string(1, c), line, col, i});
      advance(1);
      lastEnd = i;
      continue;
    }
    size_t j = i;
    while (j < n && !std::isspace((unsigned char)src[j]) && !reserved(src[j])) {
      // a '.' ends the word when followed by a blank, EOF, ')' or '}'
      if (src[j] == '.' && j > i) {
        char nx = j + 1 < n ? src[j + 1] : ' ';
        if (std::isspace((unsigned char)nx) || nx == ')' || nx == '}') break;
      }
      ++j;
    }
    std::string word = src.substr(i, j - i);
    bool blankAfter = j >= n || std::isspace((unsigned char)src[j]);
    if ((word == "--" || word == "-->" || word == "**" || word == "**>") && blankAfter) {
      size_t e = src.find('\n', i);
      if (e == std::string::npos) e = n;
      std::string body = trim(src.substr(j, e - j));
      if (word == "-->") {
        if (inBlock) {
          if (body == "end-expect") {
            out.directives.push_back({Directive::BlockEnd, "", line});
            inBlock = false;
          } else {
            out.directives.push_back({Directive::BlockLine, body, line});
          }
        } else if (body.rfind("expect-block:", 0) == 0) {
          out.directives.push_back({Directive::BlockBegin, "", line});
          inBlock = true;
        } else if (body.rfind("expect:", 0) == 0) {
          out.directives.push_back({Directive::Expect, trim(body.substr(7)), line});
        }
      }
      advance(e - i);
      continue;
    }
    // label colon: `eq[l]:` keeps ':' apart from what follows
    if (word.size() > 1 && word[0] == ':' && !out.tokens.empty() && out.tokens.back().text == "]" &&
        lastEnd == i) {
      out.tokens.push_back({":", line, col, i});
      advance(1);
      continue;
    }
    out.tokens.push_back({word, line, col, i});
    advance(j - i);
    lastEnd = i;
  }
  return out;
}

std::vector<std::string> lexWords(const std::string& src) {
  std::vector<std::string> w;
  for (auto& t : lex(src).tokens) w.push_back(t.text);
  return w;
}

}  // namespace cafe
