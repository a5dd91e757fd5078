#pragma once

#include <cmath>

#include "impute/ampute.hpp"
#include "impute/datagen.hpp"
#include "impute/dataset.hpp"
#include "impute/random.hpp"

namespace testing {

using namespace impute;

inline Dataset sample_dataset(double r2, Index n, std::uint64_t seed) {
  PopulationSpec spec;
  spec.r_squared = r2;
  spec.size = n;
  RngStream s({seed, 1});
  return generate_population(spec, s);
}

inline IncompleteDataset amputed(const Dataset& d, const MissingnessSpec& m, std::uint64_t seed) {
  RngStream s({seed, 2});
  return ampute(d, m, s);
}

inline IncompleteDataset amputed_sample(double r2, Index n, const MissingnessSpec& m, std::uint64_t seed) {
  return amputed(sample_dataset(r2, n, seed), m, seed);
}

/// Indices where the mask is set / not set.
inline std::vector<Index> where(const Mask& m, bool value) {
  std::vector<Index> out;
  for (Index i = 0; i < m.size(); ++i)
    if (m[i] == value) out.push_back(i);
  return out;
}

inline Vector pick(const Vector& v, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = v[idx[i]];
  return out;
}

}  // namespace testing
