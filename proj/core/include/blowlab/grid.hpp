#pragma once

#include <span>
#include <vector>

namespace blowlab {

// Uniform radial mesh on the ball B_R: nodes r_j = j h, h = R / J,
// j = 0 .. J (center to boundary).
struct RadialGrid {
  int n = 1;      // spatial dimension
  double R = 1.0; // ball radius
  int J = 64;     // cell count; J + 1 nodes

  RadialGrid() = default;
  RadialGrid(int n_, double R_, int J_);

  double h() const { return R / J; }
  double r(int j) const { return j * h(); }
  int nodes() const { return J + 1; }
};

// Second-order radial Laplacian f'' + (n-1)/r f'. At the origin the
// symmetry rule Delta f = 2n (f_1 - f_0)/h^2; at the outer node a
// backward-biased stencil (exact for quadratics, like the rest).
std::vector<double> laplacian_radial(const RadialGrid& grid,
                                     std::span<const double> field);

} // namespace blowlab
