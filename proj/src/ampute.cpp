#include "impute/ampute.hpp"

#include <cmath>
#include <limits>

#include "impute/errors.hpp"

namespace impute {

std::string mechanism_label(Mechanism m) { return m == Mechanism::mcar ? "MCAR" : "MAR"; }

void MissingnessSpec::validate() const {
  if (!(prop > 0.0 && prop < 1.0)) throw InvalidArgument("MissingnessSpec: prop must lie in (0, 1)");
  if (mechanism == Mechanism::mar_right && weights[0] == 0.0 && weights[1] == 0.0) {
    throw InvalidArgument("MissingnessSpec: MAR_RIGHT needs a nonzero weight on x1 or x2");
  }
}

double solve_shift(const Vector& scores, double prop) {
  if (!(prop > 0.0 && prop < 1.0)) throw InvalidArgument("solve_shift: prop must lie in (0, 1)");
  if (scores.size() == 0) throw InvalidArgument("solve_shift: no scores");
  if (!scores.allFinite()) throw InvalidArgument("solve_shift: non-finite scores");

  const auto mean_prob = [&](double b) {
    double sum = 0.0;
    for (Index i = 0; i < scores.size(); ++i) sum += logistic(scores[i] + b);
    return sum / static_cast<double>(scores.size());
  };
  // mean_prob is increasing in b; widen until the target is bracketed.
  double lo = -1.0 - scores.maxCoeff();
  double hi = 1.0 - scores.minCoeff();
  while (mean_prob(lo) > prop) lo = 2.0 * lo - 1.0;
  while (mean_prob(hi) < prop) hi = 2.0 * hi + 1.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (mean_prob(mid) < prop ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

IncompleteDataset ampute(const Dataset& data, const MissingnessSpec& spec, RngStream& stream) {
  spec.validate();
  const Index n = data.size();

  IncompleteDataset out{data, Mask::Constant(n, false), data.y};
  if (spec.mechanism == Mechanism::mcar) {
    for (Index i = 0; i < n; ++i) out.mask[i] = stream.uniform() < spec.prop;
  } else {
    // Only the fully observed columns enter the score.
    const auto standardize = [](const Vector& v) -> Vector {
      const double m = v.mean();
      const double sd = std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
      if (!(sd > 0.0)) return Vector::Zero(v.size());
      return (v.array() - m) / sd;
    };
    Vector raw = spec.weights[0] * standardize(data.x1) + spec.weights[1] * standardize(data.x2);
    const double mean = raw.mean();
    const double sd = n > 1 ? std::sqrt((raw.array() - mean).square().sum() / static_cast<double>(n - 1)) : 0.0;
    if (!(sd > 1e-12)) throw DegenerateScores("ampute: weighted scores have zero variance; unusable weight vector");
    const Vector scores = (raw.array() - mean) / sd;
    const double shift = solve_shift(scores, spec.prop);
    for (Index i = 0; i < n; ++i) out.mask[i] = stream.uniform() < logistic(scores[i] + shift);
  }
  for (Index i = 0; i < n; ++i)
    if (out.mask[i]) out.data.y[i] = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace impute
