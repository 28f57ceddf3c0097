#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace netrank {

// Deterministic 64-bit generator (splitmix64). The standard engines are
// portable but the <random> distributions are not, so every draw used by
// the library is pinned down here: identical seeds give identical streams
// on any platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n), n >= 1
  int uniform_int(int n) {
    return int((unsigned __int128)(next_u64()) * (unsigned __int128)(std::uint64_t(n)) >> 64);
  }

  // standard normal, Box-Muller, one draw per call
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (int i = int(v.size()) - 1; i > 0; --i) {
      std::swap(v[size_t(i)], v[size_t(uniform_int(i + 1))]);
    }
  }

  // first k elements of a seeded permutation of 0..n-1
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[size_t(i)] = i;
    for (int i = 0; i < k && i < n - 1; ++i) {
      int j = i + uniform_int(n - i);
      std::swap(idx[size_t(i)], idx[size_t(j)]);
    }
    idx.resize(size_t(k));
    return idx;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Stable sub-seed derivation: one top-level seed fans out to per-module,
// per-fold and per-walk streams. Mixing the tag keeps streams uncorrelated
// and lets partial reruns line up with full runs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t n = 0) {
  std::uint64_t z = seed ^ fnv1a64(tag) ^ (n * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace netrank
