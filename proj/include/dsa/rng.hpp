#ifndef DSA_RNG_HPP
#define DSA_RNG_HPP

#include <cstdint>

namespace dsa {

// splitmix64 finalizer; good enough avalanche for stream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based per-node index stream. The draw for (node, t) is a pure
/// function of (seed, node, t), so a second run -- or the saddle-point form
/// replaying the recursion's draws -- reads the identical sequence without
/// sharing mutable state.
class IndexStream {
 public:
  IndexStream() = default;
  explicit IndexStream(std::uint64_t seed) : key_(mix64(seed)) {}

  /// Uniform draw from {0, ..., q-1} for node `node` at iteration `t`.
  int draw(int node, std::int64_t t, int q) const {
    std::uint64_t h = mix64(key_ ^ (static_cast<std::uint64_t>(node) + 1));
    h = mix64(h ^ (static_cast<std::uint64_t>(t) + 0x632BE59BD9B4E019ULL));
    return static_cast<int>(h % static_cast<std::uint64_t>(q));
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
};

}  // namespace dsa

#endif  // DSA_RNG_HPP
