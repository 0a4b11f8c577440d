#include <sys/wait.h>

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "support.hpp"

namespace {
int runCli(const std::string& args) {
  std::string cmd = std::string(CAFE_BIN) + " " + args + " > /dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}
std::string data(const std::string& f) { return std::string(TEST_DATA_DIR) + "/" + f; }
}  // namespace

TEST_CASE("exit codes") {
  CHECK(runCli("--check " + data("ok.cafe")) == 0);
  CHECK(runCli("--check " + data("mismatch.cafe")) == 1);
  CHECK(runCli(data("mismatch.cafe")) == 0);   // expectations only count under --check
  CHECK(runCli("--check " + data("broken.cafe")) == 2);
  CHECK(runCli("--check " + data("missing-file.cafe")) == 2);
  CHECK(runCli("--batch " + data("ok.cafe") + " " + data("mismatch.cafe") + " --check") == 1);
}

TEST_CASE("fail-fast stops at the first failed expectation") {
  std::string out = "/tmp/cafe-ff-" + std::to_string(::getpid()) + ".txt";
  std::string cmd = std::string(CAFE_BIN) + " --check --fail-fast " + data("mismatch.cafe") + " > " + out + " 2>&1";
  CHECK(std::system(cmd.c_str()) != -1);
  std::string text = tst::slurp(out);
  std::remove(out.c_str());
  CHECK(text.find("expectation failed") != std::string::npos);
  // the second red never runs
  size_t first = text.find("\nb\n");
  CHECK((first == std::string::npos || text.find("\nb\n", first + 1) == std::string::npos));
}

TEST_CASE("budget flags reach the reducer") {
  CHECK(runCli("--check --max-nesting 16 " + std::string(CORPUS_DIR) + "/nonterm.cafe") == 0);
  CHECK(runCli("--check --max-steps 2 " + std::string(CORPUS_DIR) + "/pnat.cafe") == 2);
}

TEST_CASE("repl reads commands from stdin") {
  std::string out = "/tmp/cafe-repl-" + std::to_string(::getpid()) + ".txt";
  std::string cmd = "printf 'mod! M { [S]\\nops a b : -> S .\\neq a = b . }\\nred a .\\nquit\\n' | " +
                    std::string(CAFE_BIN) + " > " + out + " 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  std::string text = tst::slurp(out);
  std::remove(out.c_str());
  CHECK(text.find("\nb\n") != std::string::npos);
}
