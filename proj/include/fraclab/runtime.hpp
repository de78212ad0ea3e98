#pragma once

#include <cstdlib>
#include <string>
#include <thread>

namespace fraclab {

// Worker count for the few parallel kernels.  Resolution order: explicit
// argument > FRACLAB_THREADS > hardware concurrency.  All parallel code must
// produce results identical to the single-threaded path.
inline unsigned thread_budget(unsigned explicit_threads = 0) {
  if (explicit_threads > 0) return explicit_threads;
  if (const char* env = std::getenv("FRACLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0 && v < 1024) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace fraclab
