#include "blowlab/grid.hpp"

#include <stdexcept>

#include "blowlab/errors.hpp"

namespace blowlab {

RadialGrid::RadialGrid(int n_, double R_, int J_) : n(n_), R(R_), J(J_) {
  if (n < 1) throw ConfigError("grid: dimension n must be >= 1");
  if (!(R > 0.0)) throw ConfigError("grid: radius R must be positive");
  if (J < 64) throw ConfigError("grid: J must be >= 64");
}

std::vector<double> laplacian_radial(const RadialGrid& grid,
                                     std::span<const double> field) {
  const int J = grid.J;
  if (static_cast<int>(field.size()) != J + 1) {
    throw std::invalid_argument("laplacian_radial: field size must be J+1");
  }
  const double h = grid.h();
  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> out(J + 1);

  out[0] = 2.0 * grid.n * (field[1] - field[0]) * inv_h2;
  for (int j = 1; j < J; ++j) {
    const double second = (field[j + 1] - 2.0 * field[j] + field[j - 1]) * inv_h2;
    const double first = (field[j + 1] - field[j - 1]) / (2.0 * h);
    out[j] = second + (grid.n - 1) / grid.r(j) * first;
  }
  // Outer node: one-sided, still exact for quadratics.
  const double second_b = (field[J] - 2.0 * field[J - 1] + field[J - 2]) * inv_h2;
  const double first_b = (3.0 * field[J] - 4.0 * field[J - 1] + field[J - 2]) / (2.0 * h);
  out[J] = second_b + (grid.n - 1) / grid.r(J) * first_b;
  return out;
}

} // namespace blowlab
