#include "blowlab/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blowlab {

MonotoneCubic::MonotoneCubic(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
  const size_t n = x_.size();
  if (n < 2 || y_.size() != n) {
    throw std::invalid_argument("MonotoneCubic: need >= 2 matching nodes");
  }
  for (size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw std::invalid_argument("MonotoneCubic: nodes must be strictly increasing");
    }
  }
  m_.assign(n, 0.0);
  std::vector<double> h(n - 1), d(n - 1);
  for (size_t k = 0; k + 1 < n; ++k) {
    h[k] = x_[k + 1] - x_[k];
    d[k] = (y_[k + 1] - y_[k]) / h[k];
  }
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (size_t k = 1; k + 1 < n; ++k) {
    const double prod = d[k - 1] * d[k];
    if (prod > 0.0) {
      // Fritsch-Butland weighted harmonic mean of the neighbouring secants.
      const double a = (h[k - 1] + 2.0 * h[k]) / (3.0 * (h[k - 1] + h[k]));
      m_[k] = prod / (a * d[k] + (1.0 - a) * d[k - 1]);
    } else {
      m_[k] = 0.0; // local extremum: flatten to preserve shape
    }
  }
}

size_t MonotoneCubic::find_cell(double xq) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
  size_t k = static_cast<size_t>(it - x_.begin());
  if (k == 0) return 0;
  if (k >= x_.size()) return x_.size() - 2;
  return k - 1;
}

double MonotoneCubic::operator()(double xq) const {
  if (xq <= x_.front()) return y_.front();
  if (xq >= x_.back()) return y_.back();
  const size_t k = find_cell(xq);
  const double h = x_[k + 1] - x_[k];
  const double t = (xq - x_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[k] + h10 * h * m_[k] + h01 * y_[k + 1] + h11 * h * m_[k + 1];
}

MonotoneCubic radial_interpolant(std::span<const double> r,
                                 std::span<const double> values) {
  if (r.size() < 3 || r[0] != 0.0) {
    return MonotoneCubic(r, values);
  }
  std::vector<double> x(r.size() + 1), y(values.size() + 1);
  x[0] = -r[1];
  y[0] = values[1];
  std::copy(r.begin(), r.end(), x.begin() + 1);
  std::copy(values.begin(), values.end(), y.begin() + 1);
  return MonotoneCubic(x, y);
}

double MonotoneCubic::derivative(double xq) const {
  if (xq <= x_.front()) return m_.front();
  if (xq >= x_.back()) return m_.back();
  const size_t k = find_cell(xq);
  const double h = x_[k + 1] - x_[k];
  const double t = (xq - x_[k]) / h;
  const double t2 = t * t;
  const double dh00 = (6.0 * t2 - 6.0 * t) / h;
  const double dh10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double dh01 = (-6.0 * t2 + 6.0 * t) / h;
  const double dh11 = 3.0 * t2 - 2.0 * t;
  return dh00 * y_[k] + dh10 * m_[k] + dh01 * y_[k + 1] + dh11 * m_[k + 1];
}

} // namespace blowlab
