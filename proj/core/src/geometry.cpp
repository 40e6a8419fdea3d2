#include "karlin/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace karlin::geometry {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSqrt2 = 1.414213562373095048801688724209698079;

void check_grid(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + ": empty grid");
  double prev = -1.0;
  for (double t : grid) {
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument(std::string(what) + ": grid values must lie in [0,1]");
    if (!(t > prev))
      throw std::invalid_argument(std::string(what) + ": grid must be strictly increasing");
    prev = t;
  }
}

double sphere_theta(const Sphere& s, std::size_t i_theta) {
  return kPi * static_cast<double>(i_theta) / static_cast<double>(s.n_theta - 1);
}

}  // namespace

std::vector<std::size_t> grid_shape(const Geometry& geom) {
  return std::visit(
      [](const auto& g) -> std::vector<std::size_t> {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, HalfLine>) {
          return {g.grid.size()};
        } else if constexpr (std::is_same_v<T, Rectangle> ||
                             std::is_same_v<T, Chentsov2D>) {
          return {g.grid1.size(), g.grid2.size()};
        } else {
          return {g.n_phi, g.n_theta};
        }
      },
      geom);
}

std::size_t grid_size(const Geometry& geom) {
  std::size_t n = 1;
  for (std::size_t d : grid_shape(geom)) n *= d;
  return n;
}

std::string geometry_name(const Geometry& geom) {
  return std::visit(
      [](const auto& g) -> std::string {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, HalfLine>) return "halfline";
        else if constexpr (std::is_same_v<T, Rectangle>) return "rectangle";
        else if constexpr (std::is_same_v<T, Chentsov2D>) return "chentsov2d";
        else return "sphere";
      },
      geom);
}

void validate(const Geometry& geom) {
  std::visit(
      [](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, HalfLine>) {
          check_grid(g.grid, "HalfLine");
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          check_grid(g.grid1, "Rectangle");
          check_grid(g.grid2, "Rectangle");
        } else if constexpr (std::is_same_v<T, Chentsov2D>) {
          check_grid(g.grid1, "Chentsov2D");
          check_grid(g.grid2, "Chentsov2D");
        } else {
          if (g.n_phi < 1 || g.n_theta < 2)
            throw std::invalid_argument("Sphere: lattice must be at least 1x2");
        }
      },
      geom);
}

Point sphere_grid_point(const Sphere& sphere, std::size_t flat_index) {
  const std::size_t i_phi = flat_index / sphere.n_theta;
  const std::size_t i_theta = flat_index % sphere.n_theta;
  const double phi = 2.0 * kPi * static_cast<double>(i_phi) /
                     static_cast<double>(sphere.n_phi);
  const double theta = sphere_theta(sphere, i_theta);
  return Point{{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                std::cos(theta)}};
}

double mu_index_set(const Geometry& geom, std::size_t flat_index) {
  return std::visit(
      [flat_index](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, HalfLine>) {
          return g.grid.at(flat_index);
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          const double t1 = g.grid1.at(flat_index / g.grid2.size());
          const double t2 = g.grid2.at(flat_index % g.grid2.size());
          return t1 * t2;
        } else if constexpr (std::is_same_v<T, Chentsov2D>) {
          const double t1 = g.grid1.at(flat_index / g.grid2.size());
          const double t2 = g.grid2.at(flat_index % g.grid2.size());
          return 2.0 * std::hypot(t1, t2);
        } else {
          if (g.hemisphere_index) return 2.0 * kPi;
          // mu(H_x symm-diff H_o) = 4 * geodesic distance = 4 * polar angle.
          const std::size_t i_theta = flat_index % g.n_theta;
          return 4.0 * sphere_theta(g, i_theta);
        }
      },
      geom);
}

double mu_symmetric_difference(const Geometry& geom, std::size_t index_a,
                               std::size_t index_b) {
  return std::visit(
      [index_a, index_b](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, HalfLine>) {
          return std::fabs(g.grid.at(index_a) - g.grid.at(index_b));
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          const double s1 = g.grid1.at(index_a / g.grid2.size());
          const double s2 = g.grid2.at(index_a % g.grid2.size());
          const double t1 = g.grid1.at(index_b / g.grid2.size());
          const double t2 = g.grid2.at(index_b % g.grid2.size());
          return s1 * s2 + t1 * t2 -
                 2.0 * std::min(s1, t1) * std::min(s2, t2);
        } else if constexpr (std::is_same_v<T, Chentsov2D>) {
          const double s1 = g.grid1.at(index_a / g.grid2.size());
          const double s2 = g.grid2.at(index_a % g.grid2.size());
          const double t1 = g.grid1.at(index_b / g.grid2.size());
          const double t2 = g.grid2.at(index_b % g.grid2.size());
          return 2.0 * std::hypot(s1 - t1, s2 - t2);
        } else {
          // Both index modes reduce to mu(H_x symm-diff H_y) = 4 d(x, y).
          const Point x = sphere_grid_point(g, index_a);
          const Point y = sphere_grid_point(g, index_b);
          double dot = x.coords[0] * y.coords[0] + x.coords[1] * y.coords[1] +
                       x.coords[2] * y.coords[2];
          dot = std::min(1.0, std::max(-1.0, dot));
          return 4.0 * std::acos(dot);
        }
      },
      geom);
}

double mu_window(const Geometry& geom) {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, HalfLine> || std::is_same_v<T, Rectangle>)
          return 1.0;
        else if constexpr (std::is_same_v<T, Chentsov2D>)
          return kSqrt2 * 2.0 * kPi;
        else
          return 4.0 * kPi;
      },
      geom);
}

Point sample_window_point(const Geometry& geom, RngStream& rng) {
  return std::visit(
      [&rng](const auto& g) -> Point {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, HalfLine>) {
          return Point{{rng.uniform(), 0.0, 0.0}};
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          return Point{{rng.uniform(), rng.uniform(), 0.0}};
        } else if constexpr (std::is_same_v<T, Chentsov2D>) {
          return Point{{2.0 * kPi * rng.uniform(), kSqrt2 * rng.uniform(), 0.0}};
        } else {
          for (;;) {
            double x = 0.0, y = 0.0, z = 0.0, n2 = 0.0;
            // Box-Muller pairs; one draw discarded.
            const double u1 = rng.uniform_pos();
            const double u2 = rng.uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            x = r * std::cos(2.0 * kPi * u2);
            y = r * std::sin(2.0 * kPi * u2);
            const double u3 = rng.uniform_pos();
            const double u4 = rng.uniform();
            z = std::sqrt(-2.0 * std::log(u3)) * std::cos(2.0 * kPi * u4);
            n2 = x * x + y * y + z * z;
            if (n2 > 1e-12) {
              const double inv = 1.0 / std::sqrt(n2);
              return Point{{x * inv, y * inv, z * inv}};
            }
          }
        }
      },
      geom);
}

bool point_in_index_set(const Geometry& geom, const Point& point,
                        std::size_t flat_index) {
  return std::visit(
      [&point, flat_index](const auto& g) -> bool {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, HalfLine>) {
          return point.coords[0] <= g.grid.at(flat_index);
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          const double t1 = g.grid1.at(flat_index / g.grid2.size());
          const double t2 = g.grid2.at(flat_index % g.grid2.size());
          return point.coords[0] <= t1 && point.coords[1] <= t2;
        } else if constexpr (std::is_same_v<T, Chentsov2D>) {
          const double t1 = g.grid1.at(flat_index / g.grid2.size());
          const double t2 = g.grid2.at(flat_index % g.grid2.size());
          const double proj =
              std::cos(point.coords[0]) * t1 + std::sin(point.coords[0]) * t2;
          return point.coords[1] < proj && point.coords[1] > 0.0;
        } else {
          const Point x = sphere_grid_point(g, flat_index);
          const double dot = x.coords[0] * point.coords[0] +
                             x.coords[1] * point.coords[1] +
                             x.coords[2] * point.coords[2];
          const bool in_hx = dot > 0.0;
          if (g.hemisphere_index) return in_hx;
          const bool in_ho = point.coords[2] > 0.0;  // o = north pole
          return in_hx != in_ho;
        }
      },
      geom);
}

Geometry make_geometry(const std::string& name, std::size_t n, std::size_t m) {
  auto uniform_grid = [](std::size_t k) {
    std::vector<double> g(k);
    for (std::size_t i = 0; i < k; ++i)
      g[i] = static_cast<double>(i + 1) / static_cast<double>(k);
    return g;
  };
  if (name == "halfline") {
    HalfLine g{uniform_grid(n)};
    validate(Geometry{g});
    return g;
  }
  if (name == "rectangle") {
    Rectangle g{uniform_grid(n), uniform_grid(m == 0 ? n : m)};
    validate(Geometry{g});
    return g;
  }
  if (name == "chentsov2d") {
    Chentsov2D g{uniform_grid(n), uniform_grid(m == 0 ? n : m)};
    validate(Geometry{g});
    return g;
  }
  if (name == "sphere") {
    Sphere g{n, m == 0 ? n : m, false};
    validate(Geometry{g});
    return g;
  }
  throw std::invalid_argument("unknown geometry: " + name);
}

}  // namespace karlin::geometry
