#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsatc/matrix.hpp"

namespace nsatc {

struct LogisticParams {
  std::uint32_t epochs = 300;
  double step = 0.5;
};

/// Linear log-odds model over standardized features, fit by full-batch
/// gradient descent from zero weights.
struct LogisticModel {
  std::vector<double> mean;
  std::vector<double> scale;  // 1/sd, or 0 for constant columns
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t n_features = 0;
  std::uint64_t schema_fingerprint = 0;

  double log_odds(std::span<const double> v) const;
  double predict_proba(std::span<const double> v) const;
  int predict(std::span<const double> v) const { return log_odds(v) > 0.0 ? 1 : 0; }
};

LogisticModel logistic_baseline_train(const Matrix& x, std::span<const std::uint8_t> y,
                                      const LogisticParams& params);

}  // namespace nsatc
