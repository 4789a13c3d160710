#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace rgc {

/// Derives a child seed from a root seed and a stream name. Every random
/// draw in the system flows from one root seed through named sub-streams
/// (dataset, noise, init, batch-order), so changing e.g. the batch size
/// never changes the dataset or noise realization.
std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view stream_name);

/// Deterministic random stream. Distributions are hand-rolled on top of
/// mt19937_64 so sequences are bit-reproducible across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}
  RandomStream(std::uint64_t root_seed, std::string_view stream_name)
      : gen_(derive_seed(root_seed, stream_name)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform01();
  double uniform(double lo, double hi);
  /// Standard normal (Box-Muller).
  double normal();
  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi);

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const int j = uniform_int(0, static_cast<int>(i) - 1);
      std::swap(items[i - 1], items[static_cast<std::size_t>(j)]);
    }
  }

 private:
  std::mt19937_64 gen_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace rgc
