#include "annoloop/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace annoloop {

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

unsigned threads_from_env() {
  const char* raw = std::getenv("ANNOLOOP_THREADS");
  if (raw == nullptr) return resolve_threads(0);
  std::string_view s(raw);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return resolve_threads(0);
  return resolve_threads(value);
}

}  // namespace annoloop
