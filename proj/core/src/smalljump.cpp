#include "karlin/smalljump.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "karlin/occupancy.hpp"
#include "karlin/stats.hpp"

namespace karlin::smalljump {

using geometry::Geometry;

CovarianceKernel::CovarianceKernel(Geometry g, double b)
    : geom(std::move(g)), beta(b) {
  if (!(b > 0.0 && b < 1.0))
    throw std::domain_error("CovarianceKernel: beta must lie in (0,1)");
  geometry::validate(geom);
}

double CovarianceKernel::operator()(std::size_t a, std::size_t b) const {
  const double ma = std::pow(geometry::mu_index_set(geom, a), beta);
  const double mb = std::pow(geometry::mu_index_set(geom, b), beta);
  const double md = std::pow(geometry::mu_symmetric_difference(geom, a, b), beta);
  return 0.5 * (ma + mb - md);
}

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace

FieldGrid simulate_fbm_halfline(const std::vector<double>& grid, double beta,
                                RngStream& rng) {
  geometry::validate(Geometry{geometry::HalfLine{grid}});
  const std::size_t n = grid.size();
  const double delta = grid[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(grid[i] - delta * static_cast<double>(i + 1)) > 1e-9 * delta)
      throw std::invalid_argument("simulate_fbm_halfline: grid must be uniform");
  }
  const double h2 = beta;  // 2H

  // Autocovariance of fractional Gaussian noise increments at lag k.
  auto gamma = [&](std::size_t k) {
    const double kk = static_cast<double>(k);
    return 0.5 * std::pow(delta, h2) *
           (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) +
            std::pow(std::fabs(kk - 1.0), h2));
  };

  const std::size_t m = next_pow2(2 * n);
  std::vector<std::complex<double>> row(m);
  for (std::size_t j = 0; j <= m / 2; ++j) row[j] = gamma(j);
  for (std::size_t j = m / 2 + 1; j < m; ++j) row[j] = gamma(m - j);

  std::vector<std::complex<double>> eig(m);
  fftw_plan plan = fftw_plan_dft_1d(
      static_cast<int>(m), reinterpret_cast<fftw_complex*>(row.data()),
      reinterpret_cast<fftw_complex*>(eig.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  double max_eig = 0.0;
  for (const auto& e : eig) max_eig = std::max(max_eig, e.real());
  for (const auto& e : eig)
    if (e.real() < -1e-9 * max_eig)
      throw std::runtime_error(
          "simulate_fbm_halfline: circulant eigenvalue negative (H < 1/2 "
          "should guarantee nonnegativity)");

  std::vector<std::complex<double>> spectral(m);
  spectral[0] = std::sqrt(std::max(0.0, eig[0].real())) * stats::sample_normal(rng);
  spectral[m / 2] =
      std::sqrt(std::max(0.0, eig[m / 2].real())) * stats::sample_normal(rng);
  for (std::size_t j = 1; j < m / 2; ++j) {
    const double s = std::sqrt(std::max(0.0, eig[j].real()) / 2.0);
    const double x = stats::sample_normal(rng);
    const double y = stats::sample_normal(rng);
    spectral[j] = std::complex<double>(s * x, s * y);
    spectral[m - j] = std::conj(spectral[j]);
  }

  std::vector<std::complex<double>> noise(m);
  fftw_plan plan2 = fftw_plan_dft_1d(
      static_cast<int>(m), reinterpret_cast<fftw_complex*>(spectral.data()),
      reinterpret_cast<fftw_complex*>(noise.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan2);
  fftw_destroy_plan(plan2);

  FieldGrid out;
  out.shape = {n};
  out.component = Component::small;
  out.values.resize(n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += noise[i].real() * norm;
    out.values[i] = sum;
  }
  return out;
}

AggregationPlan plan_aggregation(double beta, double mu_e0, double tolerance) {
  if (!(tolerance > 0.0 && tolerance <= 1.0))
    throw std::domain_error("plan_aggregation: tolerance must lie in (0,1]");
  const auto m = static_cast<std::int64_t>(std::ceil(1.0 / (tolerance * tolerance) - 1e-12));
  const double scale = std::sqrt(std::pow(2.0, 1.0 - beta) * std::pow(mu_e0, beta) /
                                 static_cast<double>(m));
  return AggregationPlan{m, scale};
}

FieldGrid simulate_gaussian_aggregation(const Geometry& geom, double beta,
                                        const AggregationPlan& plan,
                                        RngStream& rng, std::int64_t q_cap) {
  if (plan.m < 1)
    throw std::domain_error("simulate_gaussian_aggregation: m must be >= 1");
  FieldGrid out;
  out.shape = geometry::grid_shape(geom);
  out.component = Component::small;
  out.values.assign(geometry::grid_size(geom), 0.0);

  for (std::int64_t j = 0; j < plan.m; ++j) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(j));
    const double weight = stats::sample_normal(sub);
    const occupancy::OddOccupancy occ =
        occupancy::sample_occupancy(geom, beta, sub, q_cap);
    for (std::size_t i = 0; i < occ.bits.size(); ++i)
      if (occ.bits[i]) out.values[i] += weight;
  }
  for (double& v : out.values) v *= plan.scale;
  return out;
}

std::vector<double> simulate_gaussian_cholesky(
    const Geometry& geom, double beta,
    const std::vector<std::size_t>& grid_subset, RngStream& rng) {
  if (grid_subset.empty() || grid_subset.size() > 4096)
    throw std::invalid_argument(
        "simulate_gaussian_cholesky: subset size must lie in [1, 4096]");
  const CovarianceKernel kernel(geom, beta);
  const auto n = static_cast<Eigen::Index>(grid_subset.size());

  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel(grid_subset[static_cast<std::size_t>(i)],
                              grid_subset[static_cast<std::size_t>(j)]);
      cov(i, j) = v;
      cov(j, i) = v;
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const double floor = -1e-8 * cov.trace();
  Eigen::VectorXd eigs = solver.eigenvalues();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (eigs[i] < floor)
      throw std::runtime_error(
          "simulate_gaussian_cholesky: covariance not PSD (kernel bug signal)");
    eigs[i] = std::max(0.0, eigs[i]);
  }

  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = stats::sample_normal(rng);
  Eigen::VectorXd x =
      solver.eigenvectors() * (eigs.array().sqrt().matrix().asDiagonal() * z);
  return std::vector<double>(x.data(), x.data() + n);
}

}  // namespace karlin::smalljump
