#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

namespace pemsig {

enum class TestMethod { TTest, RankSum };

struct TestResult {
  // t statistic for TTest. For RankSum: the rank sum W of the first sample
  // on the exact path, the continuity-corrected z on the approximate path.
  double statistic = 0.0;
  std::optional<double> dof;  // Welch-Satterthwaite, t-test only
  double p_value = 1.0;       // two-sided
  TestMethod method = TestMethod::TTest;
};

struct RatioPair {
  double r1 = 0.0;          // post/pre patient-count ratio
  double r2_percent = 0.0;  // post count as % of the population
};

/// I_x(a, b), the regularized incomplete beta function, evaluated by the
/// standard continued fraction with the symmetry switch at
/// x = (a+1)/(a+b+2). Absolute accuracy ~1e-10 over a, b in (0, ~1e3).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability of Student's t distribution with `dof`
/// degrees of freedom: P(|T| >= |t|) = I_{dof/(dof+t^2)}(dof/2, 1/2).
double student_t_two_sided_p(double t, double dof);

namespace detail {
TestResult welch_t_impl(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

enum class RankSumModeImpl { Auto, NormalApprox };
TestResult rank_sum_impl(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         RankSumModeImpl mode);
}  // namespace detail

/// Unequal-variance (Welch) two-sample t-test over two equal-length
/// vectors, using unbiased sample variances and the Welch-Satterthwaite
/// degrees of freedom. When both variances vanish the test degenerates:
/// p = 1 for equal means, otherwise p = 0 with a +/-infinity statistic.
template <typename DerivedX, typename DerivedY>
TestResult welch_t(const Eigen::MatrixBase<DerivedX>& x,
                   const Eigen::MatrixBase<DerivedY>& y) {
  return detail::welch_t_impl(x.template cast<double>().eval(),
                              y.template cast<double>().eval());
}

enum class RankSumMode {
  Auto,          // exact enumeration when pooled size <= 20, else normal
  NormalApprox,  // force the tie-corrected normal approximation
};

/// Wilcoxon rank-sum test with average ranks for ties. The exact path
/// enumerates all C(n, |x|) label assignments and doubles the smaller tail
/// (capped at 1); the approximate path applies a tie-corrected variance and
/// a 0.5 continuity correction. A fully tied pool yields p = 1.
template <typename DerivedX, typename DerivedY>
TestResult rank_sum(const Eigen::MatrixBase<DerivedX>& x,
                    const Eigen::MatrixBase<DerivedY>& y,
                    RankSumMode mode = RankSumMode::Auto) {
  return detail::rank_sum_impl(x.template cast<double>().eval(),
                               y.template cast<double>().eval(),
                               mode == RankSumMode::Auto
                                   ? detail::RankSumModeImpl::Auto
                                   : detail::RankSumModeImpl::NormalApprox);
}

/// R1 = n_after / n_before (or n_after itself when n_before is zero) and
/// R2 = 100 * n_after / population.
RatioPair ratios(std::int64_t n_before, std::int64_t n_after,
                 std::int64_t population);

}  // namespace pemsig
