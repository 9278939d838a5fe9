#pragma once

#include <span>
#include <vector>

namespace blowlab {

// Monotonicity-preserving piecewise cubic (Fritsch-Butland tangents,
// Hermite evaluation). Used for radial profiles: no overshoot when the data
// develops the near-blow-up spike at the origin. Queries outside the node
// range clamp to the end values.
class MonotoneCubic {
public:
  MonotoneCubic() = default;
  MonotoneCubic(std::span<const double> x, std::span<const double> y);

  double operator()(double xq) const;
  double derivative(double xq) const;

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

private:
  size_t find_cell(double xq) const;

  std::vector<double> x_, y_, m_;
};

// Interpolant for an even radial profile: when the first node sits at r = 0
// the profile is mirrored across the origin so the tangent there is the
// symmetric zero, not the one-sided secant (which would poison anything
// evaluated inside the first cell, e.g. the scaled-field Laplacian).
MonotoneCubic radial_interpolant(std::span<const double> r,
                                 std::span<const double> values);

} // namespace blowlab
