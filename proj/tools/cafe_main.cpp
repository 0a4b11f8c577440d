#include <pthread.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cafe/session.hpp"

namespace {

struct Job {
  cafe::Options opts;
  std::vector<std::string> files;
  bool repl = false;
  int code = 0;
};

void runJob(Job& job) {
  cafe::Session s(job.opts, std::cout, std::cerr);
  if (job.repl) {
    std::string buf, line;
    std::cout << "> " << std::flush;
    while (!s.quit && std::getline(std::cin, line)) {
      buf += line + "\n";
      s.feed(buf);
      std::cout << (buf.find_first_not_of(" \t\r\n") == std::string::npos ? "> " : "| ") << std::flush;
    }
    job.code = s.errors ? 2 : 0;
    return;
  }
  for (auto& f : job.files) {
    std::ifstream in(f);
    if (!in) {
      std::cerr << f << ": cannot read\n";
      ++s.errors;
      if (job.opts.failFast) break;
      continue;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    s.run(ss.str(), f);
    if (s.stop) break;
  }
  s.summary();
  job.code = s.exitCode();
}

void* threadMain(void* p) {
  runJob(*static_cast<Job*>(p));
  return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interpreter and proof engine for an algebraic specification language"};
  Job job;
  std::vector<std::string> positional;
  app.add_option("--batch", job.files, "run files in order and exit")->expected(1, -1);
  app.add_option("files", positional, "files to run");
  app.add_option("--max-steps", job.opts.budget.maxSteps, "rewrite step budget");
  app.add_option("--max-nesting", job.opts.budget.maxNesting, "condition nesting budget");
  app.add_option("--max-states", job.opts.budget.maxStates, "search state budget");
  app.add_flag("--trace", job.opts.trace, "print oc-red traces of reductions");
  app.add_flag("--fail-fast", job.opts.failFast, "stop at the first failure");
  app.add_flag("--check", job.opts.check, "enforce expect directives");
  app.add_flag("--invariants", job.opts.invariants, "check proof tree invariants after every command");
  CLI11_PARSE(app, argc, argv);
  job.files.insert(job.files.end(), positional.begin(), positional.end());
  job.repl = job.files.empty();

  // deep condition nesting needs a large stack
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, size_t(1) << 30);
  pthread_t th;
  if (pthread_create(&th, &attr, threadMain, &job) != 0) {
    runJob(job);
  } else {
    pthread_join(th, nullptr);
  }
  pthread_attr_destroy(&attr);
  return job.code;
}
