#include "karlin/stats.hpp"

#include <cmath>
#include <limits>

namespace karlin::stats {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double c_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::domain_error("c_alpha: alpha must lie in (0,2)");
  const double u = 1.0 - alpha;
  if (u == 0.0) return 2.0 / kPi;
  // cos(pi*alpha/2) written as sin(pi*u/2): no cancellation near alpha = 1.
  return u / (std::tgamma(1.0 + u) * std::sin(kPi * u / 2.0));
}

double sigma_alpha(double alpha, double epsilon) {
  if (epsilon < 0.0) throw std::domain_error("sigma_alpha: epsilon must be >= 0");
  if (epsilon == 0.0) return 0.0;
  const double c = c_alpha(alpha);
  return std::sqrt(alpha * c / (2.0 - alpha)) * std::pow(epsilon, 1.0 - alpha / 2.0);
}

double sample_normal(RngStream& rng) {
  const double u1 = rng.uniform_pos();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double sample_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0)) throw std::domain_error("sample_gamma: shape must be > 0");
  if (shape < 1.0) {
    const double g = sample_gamma(shape + 1.0, rng);
    return g * std::pow(rng.uniform_pos(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

namespace {

std::int64_t poisson_inversion(double mean, RngStream& rng) {
  const double l = std::exp(-mean);
  std::int64_t k = 0;
  double p = rng.uniform_pos();
  while (p > l) {
    p *= rng.uniform_pos();
    ++k;
  }
  return k;
}

// Hoermann's PTRS transformed rejection, exact for mean >= 10 or so.
std::int64_t poisson_ptrs(double mean, RngStream& rng) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform_pos();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    // Saturate instead of overflowing the int64 cast for astronomical means;
    // such draws only ever land in "larger than any resource cap" branches.
    const double kc = std::min(kf, 4.0e18);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kc);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * log_mean - mean - std::lgamma(kf + 1.0))
      return static_cast<std::int64_t>(kc);
  }
}

}  // namespace

std::int64_t sample_poisson(double mean, RngStream& rng, double mean_cap) {
  if (!(mean >= 0.0)) throw std::domain_error("sample_poisson: mean must be >= 0");
  if (mean > mean_cap)
    throw std::overflow_error("sample_poisson: mean exceeds cap");
  if (mean == 0.0) return 0;
  if (mean < 30.0) return poisson_inversion(mean, rng);
  return poisson_ptrs(mean, rng);
}

double sibuya_pmf(double beta, std::int64_t k) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("sibuya_pmf: beta must lie in (0,1)");
  if (k < 1) throw std::domain_error("sibuya_pmf: k must be >= 1");
  const double kk = static_cast<double>(k);
  return std::exp(std::log(beta) - std::lgamma(1.0 - beta) +
                  std::lgamma(kk - beta) - std::lgamma(kk + 1.0));
}

double sample_sibuya_parameter(double beta, RngStream& rng) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("sample_sibuya_parameter: beta must lie in (0,1)");
  const double g1 = sample_gamma(1.0, rng);
  const double g_1mb = sample_gamma(1.0 - beta, rng);
  const double g_b = sample_gamma(beta, rng);
  return g1 * g_1mb / g_b;
}

std::int64_t sample_sibuya(double beta, RngStream& rng) {
  const double lambda = sample_sibuya_parameter(beta, rng);
  // No cap here: the Poisson mean is a double and PTRS handles any finite
  // value (saturating far beyond every resource cap); callers enforce their
  // own guards on the result.
  return 1 + sample_poisson(lambda, rng, std::numeric_limits<double>::infinity());
}

double JumpLaw::poisson_mean() const {
  return std::pow(2.0, 1.0 - beta) * std::pow(e0_mass, beta) * c_alpha(alpha) *
         std::pow(epsilon, -alpha);
}

std::int64_t sample_jump_count(const JumpLaw& law, RngStream& rng,
                               double mean_cap) {
  const double mean = law.poisson_mean();
  if (mean > mean_cap)
    throw std::overflow_error(
        "sample_jump_count: Poisson mean exceeds cap (resolution too fine / "
        "epsilon too small)");
  return sample_poisson(mean, rng, mean_cap);
}

double sample_jump_magnitude(double alpha, double epsilon, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::domain_error("sample_jump_magnitude: alpha must lie in (0,2)");
  if (!(epsilon > 0.0))
    throw std::domain_error("sample_jump_magnitude: epsilon must be > 0");
  const double sign = (rng.next_u64() & 1u) ? 1.0 : -1.0;
  return sign * epsilon * std::pow(rng.uniform_pos(), -1.0 / alpha);
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_pvalue(double statistic, double df) {
  if (statistic < 0.0) return 1.0;
  return gamma_q(df / 2.0, statistic / 2.0);
}

}  // namespace karlin::stats
