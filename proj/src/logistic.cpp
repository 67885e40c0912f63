#include "nsatc/logistic.hpp"

#include <cmath>

#include "nsatc/error.hpp"
#include "nsatc/gbdt.hpp"

namespace nsatc {

double LogisticModel::log_odds(std::span<const double> v) const {
  double z = bias;
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (scale[j] != 0.0) z += weights[j] * (v[j] - mean[j]) * scale[j];
  return z;
}

double LogisticModel::predict_proba(std::span<const double> v) const { return sigmoid(log_odds(v)); }

LogisticModel logistic_baseline_train(const Matrix& x, std::span<const std::uint8_t> y,
                                      const LogisticParams& params) {
  require(x.rows > 0 && y.size() == x.rows, ErrorKind::InputDomain,
          "training set is empty or labels do not match samples");
  const std::size_t n = x.rows, d = x.cols;
  LogisticModel m;
  m.n_features = d;
  m.mean.assign(d, 0.0);
  m.scale.assign(d, 0.0);
  m.weights.assign(d, 0.0);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m.mean[j] += x(i, j);
  for (auto& v : m.mean) v /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double c = x(i, j) - m.mean[j];
      var[j] += c * c;
    }
  for (std::size_t j = 0; j < d; ++j) {
    double sd = std::sqrt(var[j] / static_cast<double>(n));
    m.scale[j] = sd > 0.0 ? 1.0 / sd : 0.0;
  }

  Matrix z(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) z(i, j) = (x(i, j) - m.mean[j]) * m.scale[j];

  std::vector<double> grad(d);
  for (std::uint32_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = z.row(i);
      double s = m.bias;
      for (std::size_t j = 0; j < d; ++j) s += m.weights[j] * row[j];
      double err = sigmoid(s) - y[i];
      grad_bias += err;
      for (std::size_t j = 0; j < d; ++j) grad[j] += err * row[j];
    }
    double k = params.step / static_cast<double>(n);
    m.bias -= k * grad_bias;
    for (std::size_t j = 0; j < d; ++j) m.weights[j] -= k * grad[j];
  }
  return m;
}

}  // namespace nsatc
