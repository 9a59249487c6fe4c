#include "perdist/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace perdist {
namespace {

unsigned default_threads() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PERDIST_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return std::min<unsigned>(static_cast<unsigned>(v), hw);
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return hw;
}

std::atomic<unsigned>& thread_cap() {
  static std::atomic<unsigned> cap{default_threads()};
  return cap;
}

}  // namespace

unsigned max_threads() { return thread_cap().load(); }

void set_max_threads(unsigned n) { thread_cap().store(std::max(1u, n)); }

}  // namespace perdist
