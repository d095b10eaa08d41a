#include "dlo/rng.hpp"

#include <cmath>
#include <sstream>

namespace dlo {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t Rng::stream_seed(std::uint64_t root, std::string_view label, std::uint64_t index) {
  return splitmix64(root ^ fnv1a64(label) ^ splitmix64(index + 1));
}

Rng Rng::stream(std::uint64_t root, std::string_view label, std::uint64_t index) {
  return Rng(stream_seed(root, label, index));
}

int Rng::uniform_int(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return lo + static_cast<int>(r % span);
}

std::string Rng::save_state() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << engine_;
  return os.str();
}

void Rng::restore_state(const std::string& text) {
  std::istringstream is(text);
  is.imbue(std::locale::classic());
  is >> engine_;
}

}  // namespace dlo
