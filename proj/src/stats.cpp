#include "pemsig/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pemsig/errors.hpp"

namespace pemsig {

namespace {

// Continued fraction for the incomplete beta function, evaluated with the
// modified Lentz algorithm. Valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 400; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

// Average ranks of the pooled sample, 1-based; ties share their mean rank.
std::vector<double> average_ranks(const std::vector<double>& pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pooled[a] < pooled[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double normal_two_sided_p(double z_abs) {
  return std::erfc(z_abs / std::sqrt(2.0));
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || std::isnan(x) || x < 0.0 || x > 1.0) {
    throw Error(Errc::DomainError,
                "regularized_incomplete_beta requires a,b > 0 and x in [0,1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  // Strict comparison: at exact equality the fraction still converges, and
  // a >= here would bounce between the two symmetric forms forever.
  if (x > (a + 1.0) / (a + b + 2.0)) {
    return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
  }
  const double ln_prefix = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  return std::exp(ln_prefix) * beta_continued_fraction(a, b, x) / a;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) {
    throw Error(Errc::DomainError, "degrees of freedom must be > 0");
  }
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  const double p =
      regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
  return std::clamp(p, 0.0, 1.0);
}

namespace detail {

TestResult welch_t_impl(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw Error(Errc::LengthMismatch, "sample vectors differ in length");
  }
  const Eigen::Index g = x.size();
  if (g < 2) {
    throw Error(Errc::TooFewGroups, "need at least 2 groups per sample");
  }
  const double mean_x = x.mean();
  const double mean_y = y.mean();
  const double denom = static_cast<double>(g - 1);
  const double var_x = (x.array() - mean_x).square().sum() / denom;
  const double var_y = (y.array() - mean_y).square().sum() / denom;

  TestResult result;
  result.method = TestMethod::TTest;
  if (var_x == 0.0 && var_y == 0.0) {
    // Constant columns: no variability to test against.
    if (mean_x == mean_y) {
      result.statistic = 0.0;
      result.p_value = 1.0;
    } else {
      result.statistic = std::copysign(
          std::numeric_limits<double>::infinity(), mean_x - mean_y);
      result.p_value = 0.0;
    }
    return result;
  }

  const double sem_x = var_x / static_cast<double>(g);
  const double sem_y = var_y / static_cast<double>(g);
  const double se2 = sem_x + sem_y;
  result.statistic = (mean_x - mean_y) / std::sqrt(se2);
  result.dof = se2 * se2 / ((sem_x * sem_x + sem_y * sem_y) / denom);
  result.p_value = student_t_two_sided_p(result.statistic, *result.dof);
  return result;
}

TestResult rank_sum_impl(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         RankSumModeImpl mode) {
  const std::size_t nx = static_cast<std::size_t>(x.size());
  const std::size_t ny = static_cast<std::size_t>(y.size());
  if (nx == 0 || ny == 0) {
    throw Error(Errc::EmptySample, "rank_sum requires non-empty samples");
  }
  const std::size_t n = nx + ny;

  std::vector<double> pooled(n);
  for (std::size_t i = 0; i < nx; ++i) pooled[i] = x[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < ny; ++i) pooled[nx + i] = y[static_cast<Eigen::Index>(i)];
  const std::vector<double> ranks = average_ranks(pooled);
  double w = 0.0;
  for (std::size_t i = 0; i < nx; ++i) w += ranks[i];

  TestResult result;
  result.method = TestMethod::RankSum;

  if (mode == RankSumModeImpl::Auto && n <= 20) {
    // Exact permutation distribution of W over all C(n, nx) label
    // assignments. Rank sums are multiples of 1/2, so a small epsilon
    // makes the tail comparisons exact.
    constexpr double kEps = 1e-9;
    std::vector<std::size_t> pick(nx);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    std::uint64_t total = 0, n_le = 0, n_ge = 0;
    while (true) {
      double sum = 0.0;
      for (std::size_t idx : pick) sum += ranks[idx];
      ++total;
      if (sum <= w + kEps) ++n_le;
      if (sum >= w - kEps) ++n_ge;
      // Advance to the next nx-combination of {0, ..., n-1}.
      std::size_t i = nx;
      while (i > 0 && pick[i - 1] == n - nx + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t k = i; k < nx; ++k) pick[k] = pick[k - 1] + 1;
    }
    const double tail = static_cast<double>(std::min(n_le, n_ge)) /
                        static_cast<double>(total);
    result.statistic = w;
    result.p_value = std::min(1.0, 2.0 * tail);
    return result;
  }

  const double dx = static_cast<double>(nx);
  const double dy = static_cast<double>(ny);
  const double dn = static_cast<double>(n);
  const double mean_w = dx * (dn + 1.0) / 2.0;
  double tie_term = 0.0;
  {
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double var_w =
      dx * dy / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (var_w <= 0.0) {
    // Fully tied pool.
    result.statistic = 0.0;
    result.p_value = 1.0;
    return result;
  }
  const double diff = w - mean_w;
  const double corrected = std::max(std::abs(diff) - 0.5, 0.0);
  const double z = std::copysign(corrected / std::sqrt(var_w), diff);
  result.statistic = z;
  result.p_value = normal_two_sided_p(std::abs(z));
  return result;
}

}  // namespace detail

RatioPair ratios(std::int64_t n_before, std::int64_t n_after,
                 std::int64_t population) {
  if (population < 1) {
    throw Error(Errc::ZeroPopulation, "population must be >= 1");
  }
  if (n_before < 0 || n_after < 0 || n_before > population ||
      n_after > population) {
    throw std::invalid_argument("patient counts must lie in [0, population]");
  }
  RatioPair pair;
  pair.r1 = n_before != 0 ? static_cast<double>(n_after) /
                                static_cast<double>(n_before)
                          : static_cast<double>(n_after);
  pair.r2_percent =
      100.0 * static_cast<double>(n_after) / static_cast<double>(population);
  return pair;
}

}  // namespace pemsig
