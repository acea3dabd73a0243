#pragma once

// Independent reference implementations used only by tests. They stay
// deliberately naive so they cannot share a bug with the library path.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "foodsig/lexicon.hpp"

namespace foodsig::oracle {

// Enumerates every (position, length <= max_len) window against every
// lexicon entry by string comparison, then applies leftmost-longest
// selection. Quadratic and index-free on purpose.
inline std::vector<std::pair<std::size_t, std::size_t>> brute_force_matches(
    const std::vector<std::string>& tokens, const FoodLexicon& lex) {
  std::vector<std::pair<std::size_t, std::size_t>> windows;  // (pos, len)
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    for (std::size_t len = 1; len <= static_cast<std::size_t>(lex.max_tokens()) &&
                              pos + len <= tokens.size();
         ++len) {
      std::string joined;
      for (std::size_t k = 0; k < len; ++k) {
        if (k) joined += ' ';
        joined += tokens[pos + k];
      }
      for (const auto& entry : lex.entries()) {
        std::string surface_joined;
        for (std::size_t k = 0; k < entry.tokens.size(); ++k) {
          if (k) surface_joined += ' ';
          surface_joined += entry.tokens[k];
        }
        if (surface_joined == joined) windows.emplace_back(pos, len);
      }
    }
  }
  // leftmost-longest: walk positions, take the longest window at the
  // current position, skip past it
  std::vector<std::pair<std::size_t, std::size_t>> picked;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    std::size_t best_len = 0;
    for (const auto& [p, len] : windows)
      if (p == pos && len > best_len) best_len = len;
    if (best_len > 0) {
      picked.emplace_back(pos, best_len);
      pos += best_len;
    } else {
      ++pos;
    }
  }
  return picked;
}

// Textbook single-pass sums formula (vs the library's two-pass centered one).
inline double pearson_textbook(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

// O(n^2) fractional ranks, then the textbook formula.
inline std::vector<double> ranks_quadratic(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double below = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++below;
      if (v[j] == v[i]) ++equal;
    }
    out[i] = below + 0.5 * (equal - 1.0) + 1.0;
  }
  return out;
}

inline double spearman_textbook(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson_textbook(ranks_quadratic(x), ranks_quadratic(y));
}

inline double sem_textbook(const std::vector<double>& v) {
  double n = static_cast<double>(v.size());
  double mean = 0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

// Gradient descent on 0.5*||y - Z b||^2 + 0.5*lambda*||b||^2 over the
// standardized problem, run to a tight gradient norm. Standardization is
// recomputed here rather than taken from the model under test.
inline Eigen::VectorXd ridge_gradient_descent(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                              double lambda) {
  const Eigen::Index n = X.rows(), p = X.cols();
  Eigen::VectorXd mean = X.colwise().mean();
  Eigen::VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double ss = (X.col(j).array() - mean[j]).square().sum();
    scale[j] = std::sqrt(ss / static_cast<double>(n - 1));
  }
  Eigen::MatrixXd Z(n, p);
  for (Eigen::Index j = 0; j < p; ++j) Z.col(j) = (X.col(j).array() - mean[j]) / scale[j];
  Eigen::VectorXd yc = y.array() - y.mean();

  // Lipschitz constant of the gradient via the largest eigenvalue.
  Eigen::MatrixXd A = Z.transpose() * Z;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  double L = es.eigenvalues().maxCoeff() + lambda;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  for (int iter = 0; iter < 200000; ++iter) {
    Eigen::VectorXd grad = A * b - Z.transpose() * yc + lambda * b;
    if (grad.norm() < 1e-12) break;
    b -= grad / L;
  }
  return b;
}

}  // namespace foodsig::oracle
