#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace foodsig {

struct CorrelationResult {
  double r = 0.0;    // Pearson product-moment
  double rho = 0.0;  // Spearman rank correlation
  double p_r = 1.0;
  double p_rho = 1.0;
  Eigen::Index n = 0;
};

struct BootstrapCI {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  int redraws = 0;          // resamples redrawn because the statistic failed
  bool degenerate = false;  // point outside [lo, hi]
};

using VecRef = Eigen::Ref<const Eigen::VectorXd>;

// Product-moment correlation. Throws DataError on length mismatch, n < 2, or
// zero variance on either side ("degenerate input").
double pearson(const VecRef& x, const VecRef& y);

// Pearson over average-ranked data; ties get the mean rank.
double spearman(const VecRef& x, const VecRef& y);

// 1-based average ranks with mean-rank ties.
Eigen::VectorXd average_ranks(const VecRef& x);

// Two-sided p for a correlation of r over n samples via the t statistic
// r*sqrt((n-2)/(1-r^2)) against Student t with n-2 d.f. |r| >= 1 gives 0.
double corr_pvalue(double r, Eigen::Index n);

// Permutation alternative for small n: shuffles y, two-sided on |r|.
double corr_pvalue_permutation(const VecRef& x, const VecRef& y, int iters, std::uint64_t seed);

// Pearson + Spearman + both p-values in one pass.
CorrelationResult correlate(const VecRef& x, const VecRef& y);

// Case (joint-pair) resampling bootstrap; CI bounds are the 2.5th/97.5th
// nearest-rank percentiles of `stat` over `iters` resamples. Per-iteration
// seed = derive_seed(seed, iteration), so parallel evaluation reduces to the
// sequential result. A resample on which `stat` throws is redrawn (counted).
BootstrapCI bootstrap_ci(const VecRef& x, const VecRef& y,
                         const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& stat,
                         int iters = 1000, std::uint64_t seed = 0);

struct FactorDifference {
  double diff = 0.0;  // mean(values | flag) - mean(values | !flag)
  double p = 1.0;     // Welch two-sample t-test, two-sided
  Eigen::Index n_flagged = 0;
  Eigen::Index n_unflagged = 0;
};

FactorDifference factor_difference(const VecRef& values, const std::vector<bool>& flags);

// Sample (n-1) standard deviation / sqrt(n). Throws for n < 2.
double sem(const VecRef& values);

double mean(const VecRef& values);
double sample_sd(const VecRef& values);

// Nearest-rank percentile: sorted[ceil(pct/100 * n) - 1]. pct in [0, 100].
double percentile_nearest_rank(std::vector<double> values, double pct);

// Two-sided tail mass of Student t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

}  // namespace foodsig
