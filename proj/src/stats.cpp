#include "foodsig/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "foodsig/error.hpp"
#include "foodsig/rng.hpp"

namespace foodsig {

namespace {

double log_gamma(double x) {
  // Lanczos approximation, g=5, n=6.
  static const double coef[6] = {76.18009172947146,  -86.50532032941677, 24.01409824083091,
                                 -1.231739572450155, 0.1208650973866179e-2, -0.5395239384953e-5};
  double y = x;
  double tmp = x + 5.5;
  tmp -= (x + 0.5) * std::log(tmp);
  double ser = 1.000000000190015;
  for (double c : coef) ser += c / ++y;
  return -tmp + std::log(2.5066282746310005 * ser / x);
}

double beta_cf(double a, double b, double x) {
  // Continued fraction for incomplete beta (modified Lentz).
  const int max_iter = 300;
  const double eps = 3e-14, fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

void check_pair(const VecRef& x, const VecRef& y) {
  if (x.size() != y.size()) throw DataError("correlation: length mismatch");
  if (x.size() < 2) throw DataError("correlation: need at least 2 samples");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double bt = std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                       b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

double mean(const VecRef& v) {
  if (v.size() == 0) throw DataError("mean: empty input");
  return v.mean();
}

double sample_sd(const VecRef& v) {
  if (v.size() < 2) throw DataError("sample_sd: need at least 2 samples");
  double m = v.mean();
  double ss = (v.array() - m).square().sum();
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double sem(const VecRef& v) {
  if (v.size() < 2) throw DataError("sem: need at least 2 samples");
  return sample_sd(v) / std::sqrt(static_cast<double>(v.size()));
}

double pearson(const VecRef& x, const VecRef& y) {
  check_pair(x, y);
  double mx = x.mean(), my = y.mean();
  Eigen::ArrayXd dx = x.array() - mx, dy = y.array() - my;
  double sxx = (dx * dx).sum(), syy = (dy * dy).sum();
  if (sxx == 0.0 || syy == 0.0) throw DataError("pearson: degenerate input (zero variance)");
  double r = (dx * dy).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

Eigen::VectorXd average_ranks(const VecRef& x) {
  Eigen::Index n = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return x[a] < x[b]; });
  Eigen::VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && x[order[static_cast<std::size_t>(j + 1)]] == x[order[static_cast<std::size_t>(i)]]) ++j;
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based mean rank of the tie group
    for (Eigen::Index k = i; k <= j; ++k) ranks[order[static_cast<std::size_t>(k)]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(const VecRef& x, const VecRef& y) {
  check_pair(x, y);
  return pearson(average_ranks(x), average_ranks(y));
}

double corr_pvalue(double r, Eigen::Index n) {
  if (n < 3) throw DataError("corr_pvalue: need n >= 3");
  if (std::fabs(r) >= 1.0) return 0.0;
  double df = static_cast<double>(n - 2);
  double t = r * std::sqrt(df / (1.0 - r * r));
  return student_t_two_sided_p(t, df);
}

double corr_pvalue_permutation(const VecRef& x, const VecRef& y, int iters, std::uint64_t seed) {
  check_pair(x, y);
  if (iters < 1) throw ConfigError("corr_pvalue_permutation: iters must be >= 1");
  double observed = std::fabs(pearson(x, y));
  Eigen::VectorXd yp = y;
  int hits = 0;
  for (int it = 0; it < iters; ++it) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(it)));
    for (Eigen::Index i = yp.size(); i > 1; --i) {
      Eigen::Index j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i)));
      std::swap(yp[i - 1], yp[j]);
    }
    double rp;
    try {
      rp = pearson(x, yp);
    } catch (const DataError&) {
      rp = 0.0;  // constant permutation cannot exceed a nonzero observed |r|
    }
    if (std::fabs(rp) >= observed - 1e-15) ++hits;
  }
  return (1.0 + hits) / (1.0 + iters);
}

CorrelationResult correlate(const VecRef& x, const VecRef& y) {
  CorrelationResult res;
  res.n = x.size();
  res.r = pearson(x, y);
  res.rho = spearman(x, y);
  res.p_r = corr_pvalue(res.r, res.n);
  res.p_rho = corr_pvalue(res.rho, res.n);
  return res;
}

double percentile_nearest_rank(std::vector<double> values, double pct) {
  if (values.empty()) throw DataError("percentile: empty input");
  if (pct < 0.0 || pct > 100.0) throw ConfigError("percentile: pct outside [0,100]");
  std::sort(values.begin(), values.end());
  auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
  if (rank < 1) rank = 1;
  if (rank > values.size()) rank = values.size();
  return values[rank - 1];
}

BootstrapCI bootstrap_ci(const VecRef& x, const VecRef& y,
                         const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& stat,
                         int iters, std::uint64_t seed) {
  if (x.size() == 0) throw DataError("bootstrap_ci: empty data");
  if (x.size() != y.size()) throw DataError("bootstrap_ci: length mismatch");
  if (iters < 1) throw ConfigError("bootstrap_ci: iters must be >= 1");
  BootstrapCI ci;
  ci.iterations = iters;
  ci.seed = seed;
  ci.point = stat(x, y);
  const auto n = static_cast<std::size_t>(x.size());
  std::vector<double> draws(static_cast<std::size_t>(iters));
  int redraws = 0;
  for (int it = 0; it < iters; ++it) {
    double value = 0.0;
    bool ok = false;
    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(it), attempt));
      Eigen::VectorXd xr(x.size()), yr(y.size());
      for (std::size_t i = 0; i < n; ++i) {
        auto j = static_cast<Eigen::Index>(rng.below(n));
        xr[static_cast<Eigen::Index>(i)] = x[j];
        yr[static_cast<Eigen::Index>(i)] = y[j];
      }
      try {
        value = stat(xr, yr);
        ok = true;
        break;
      } catch (const DataError&) {
        ++redraws;
      }
    }
    if (!ok) throw DataError("bootstrap_ci: statistic failed on 1000 consecutive resamples");
    draws[static_cast<std::size_t>(it)] = value;
  }
  ci.redraws = redraws;
  ci.lo = percentile_nearest_rank(draws, 2.5);
  ci.hi = percentile_nearest_rank(std::move(draws), 97.5);
  ci.degenerate = !(ci.lo <= ci.point && ci.point <= ci.hi);
  return ci;
}

FactorDifference factor_difference(const VecRef& values, const std::vector<bool>& flags) {
  if (static_cast<std::size_t>(values.size()) != flags.size())
    throw DataError("factor_difference: length mismatch");
  std::vector<double> a, b;
  for (std::size_t i = 0; i < flags.size(); ++i)
    (flags[i] ? a : b).push_back(values[static_cast<Eigen::Index>(i)]);
  if (a.size() < 2 || b.size() < 2)
    throw DataError("factor_difference: each group needs at least 2 samples");
  auto stats = [](const std::vector<double>& v) {
    double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair<double, double>(m, ss / static_cast<double>(v.size() - 1));
  };
  auto [m1, v1] = stats(a);
  auto [m2, v2] = stats(b);
  FactorDifference out;
  out.diff = m1 - m2;
  out.n_flagged = static_cast<Eigen::Index>(a.size());
  out.n_unflagged = static_cast<Eigen::Index>(b.size());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double se2 = v1 / na + v2 / nb;
  if (se2 == 0.0) {
    out.p = out.diff == 0.0 ? 1.0 : 0.0;
    return out;
  }
  double t = out.diff / std::sqrt(se2);
  double df = se2 * se2 / ((v1 / na) * (v1 / na) / (na - 1.0) + (v2 / nb) * (v2 / nb) / (nb - 1.0));
  out.p = student_t_two_sided_p(t, df);
  return out;
}

}  // namespace foodsig
