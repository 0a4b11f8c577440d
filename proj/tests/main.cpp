#define DOCTEST_CONFIG_IMPLEMENT
#include <pthread.h>

#include "doctest.h"

namespace {
struct Args {
  int argc;
  char** argv;
  int code = 0;
};
void* body(void* p) {
  auto* a = static_cast<Args*>(p);
  doctest::Context ctx(a->argc, a->argv);
  a->code = ctx.run();
  return nullptr;
}
}  // namespace

// deep condition nesting wants more stack than the main thread has
int main(int argc, char** argv) {
  Args a{argc, argv};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, size_t(1) << 30);
  pthread_t th;
  if (pthread_create(&th, &attr, body, &a) != 0) return body(&a), a.code;
  pthread_join(th, nullptr);
  return a.code;
}
