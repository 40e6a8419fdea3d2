#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "karlin/rng.hpp"

namespace karlin::geometry {

/// A sampled window point. Interpretation depends on the geometry:
///  - HalfLine:   coords[0] in [0,1]
///  - Rectangle:  (coords[0], coords[1]) in [0,1]^2
///  - Chentsov2D: coords[0] = angle in [0,2pi), coords[1] = radius in [0,sqrt 2]
///  - Sphere:     unit 3-vector
struct Point {
  std::array<double, 3> coords{0.0, 0.0, 0.0};
};

/// E0 = [0,1], A_t = [0,t] over a strictly increasing grid in [0,1].
struct HalfLine {
  std::vector<double> grid;
};

/// E0 = [0,1]^2, A_t = [0,t1]x[0,t2] over a product lattice.
struct Rectangle {
  std::vector<double> grid1;
  std::vector<double> grid2;
};

/// E0 = S^1 x [0,sqrt 2] with the angular measure of total mass 2pi,
/// A_t = {(s,r): 0 < r < <s,t>}, t on a lattice in [0,1]^2.
struct Chentsov2D {
  std::vector<double> grid1;
  std::vector<double> grid2;
};

/// E0 = S^2, polar lattice of n_phi x n_theta points. In the default (pinned)
/// mode the index sets are A_x = H_x symmetric-difference H_o with o the north
/// pole; in hemisphere mode they are the hemispheres H_x themselves (used by
/// the rotationally stationary Gaussian substitute, pin-down applied
/// downstream).
struct Sphere {
  std::size_t n_phi = 0;
  std::size_t n_theta = 0;
  bool hemisphere_index = false;
};

using Geometry = std::variant<HalfLine, Rectangle, Chentsov2D, Sphere>;

/// Grid shape: {n} for HalfLine, {n1, n2} otherwise (row-major flattening).
std::vector<std::size_t> grid_shape(const Geometry& geom);
std::size_t grid_size(const Geometry& geom);
std::string geometry_name(const Geometry& geom);

/// Validates grids (strictly increasing, inside the window). Throws
/// std::invalid_argument on violation.
void validate(const Geometry& geom);

/// Unit 3-vector of the sphere lattice node behind a flat grid index.
Point sphere_grid_point(const Sphere& sphere, std::size_t flat_index);

/// mu(A_t) for the grid index.
double mu_index_set(const Geometry& geom, std::size_t flat_index);

/// mu(A_s symmetric-difference A_t) for two grid indices.
double mu_symmetric_difference(const Geometry& geom, std::size_t index_a,
                               std::size_t index_b);

/// mu(E0): 1, 1, sqrt(2)*2pi, 4pi.
double mu_window(const Geometry& geom);

/// A mu-uniform point of the window E0.
Point sample_window_point(const Geometry& geom, RngStream& rng);

/// Membership of a window point in the index set A_t.
bool point_in_index_set(const Geometry& geom, const Point& point,
                        std::size_t flat_index);

/// Uniform lattices used by the CLI: HalfLine {i/n}, Rectangle/Chentsov2D
/// {i/n}x{j/m}, Sphere polar n x m.
Geometry make_geometry(const std::string& name, std::size_t n, std::size_t m);

}  // namespace karlin::geometry
