#pragma once

// Counter-based random streams.
//
// Every stream is Philox4x32-10 keyed by the base seed. The 128-bit counter is
// split into a 64-bit block index (low half) and the 64-bit stream id (high
// half), so two streams with different ids never share a counter value under
// the same key. Draw order within a stream is fixed: one 64-bit word per
// uniform, one uniform per normal (inverse CDF), so splitting a request of n
// draws into several calls never changes the sequence.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace impute {

struct SeedSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t stream_id = 0;
};

/// What a stream is used for inside one harness replication.
enum class Purpose : std::uint64_t {
  population = 1,
  sampling = 2,
  amputation = 3,
  imputation = 4,
  figure = 5,
  decomposition = 6,
};

/// Mixes an ordered list of words into a stream id (splitmix64 finalizer chain).
std::uint64_t hash_words(std::initializer_list<std::uint64_t> words);

/// FNV-1a over a label; used to key cells by content rather than position.
std::uint64_t hash_label(std::string_view label);

/// Stream id for (cell key, replication, purpose).
inline std::uint64_t stream_id_for(std::uint64_t cell_key, std::uint64_t replication, Purpose purpose) {
  return hash_words({cell_key, replication, static_cast<std::uint64_t>(purpose)});
}

class RngStream {
 public:
  explicit RngStream(SeedSpec spec);

  const SeedSpec& spec() const { return spec_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on the open interval (0, 1).
  double open_uniform();

  double standard_normal();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Independent child stream; consumes one word from this stream.
  RngStream spawn();

 private:
  void refill();

  SeedSpec spec_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

RngStream make_stream(SeedSpec spec);

Eigen::VectorXd draw_standard_normal(RngStream& stream, Eigen::Index n);
Eigen::VectorXd draw_uniform(RngStream& stream, Eigen::Index n);

/// k distinct indices from [0, population_size) in random order.
std::vector<Eigen::Index> sample_without_replacement(RngStream& stream, Eigen::Index population_size, Eigen::Index k);

double draw_gamma(RngStream& stream, double shape);
double draw_chi_square(RngStream& stream, Eigen::Index dof);

/// Standard normal quantile (Wichura's AS 241, about 1e-16 relative accuracy).
double normal_quantile(double p);

}  // namespace impute
