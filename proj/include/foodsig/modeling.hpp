#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "foodsig/features.hpp"

namespace foodsig {

struct DesignMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> column_names;
  Eigen::MatrixXd values;  // rows x columns, no missing values
  std::vector<std::string> groups;  // row -> state
  Eigen::VectorXd target;
  std::string target_name;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  // Columns whose name starts with any prefix; throws if none resolve.
  DesignMatrix select_columns(const std::vector<std::string>& prefixes) const;
  DesignMatrix select_rows(const std::vector<Eigen::Index>& rows) const;
  void validate() const;
};

enum class Target { obesity, diabetes };
Target target_from_string(std::string_view s);
std::string to_string(Target t);

// Region aggregates -> design matrix. Column order: cal:avg_cal,
// demog:{under_18,over_65,female,afro_hispanic,log_income}, cat:*, food:*,
// hashtag:*, stat:* (prefix groups sorted internally). Regions missing a
// required value (no mean avg_cal or no census) are dropped with a count.
DesignMatrix build_design_matrix(const std::vector<RegionAggregate>& regions, Target target,
                                 std::size_t* dropped_incomplete = nullptr);

struct RidgeModel {
  std::vector<std::string> columns;
  Eigen::VectorXd coefficients;      // original units
  Eigen::VectorXd std_coefficients;  // on z-scored columns (dropped cols = 0)
  double intercept = 0.0;
  double lambda = 1.0;
  Eigen::VectorXd means, scales;     // standardization parameters, scales > 0
  std::vector<std::string> dropped_columns;  // constant columns, coefficient 0
  bool rank_deficient = false;       // lambda = 0 on a rank-deficient design

  Eigen::VectorXd predict(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  std::string to_json() const;
  static RidgeModel from_json(const std::string& text);
};

// Z-scored columns, centered target, beta = (Z'Z + lambda I)^-1 Z'y; the
// intercept restores original units. lambda = 0 solves least squares by
// complete orthogonal decomposition (minimum-norm under rank deficiency).
RidgeModel ridge_fit(const DesignMatrix& X, double lambda = 1.0);

// States shuffled by seed and dealt round-robin into k folds; every row gets
// its state's fold, so no state ever spans folds.
std::vector<int> grouped_folds(const std::vector<std::string>& groups, int k = 5,
                               std::uint64_t seed = 0);

struct ModelSpec {
  std::string name;
  std::vector<std::string> column_prefixes;
};

// Demog, Liwc, Calories, Food, Liwc-Demog, Food-Demog + the two baselines.
const std::vector<ModelSpec>& standard_model_specs();
const ModelSpec& model_spec(std::string_view name);

struct EvalResult {
  std::string model_name;
  std::string target_name;
  std::vector<double> fold_r;  // held-out Pearson per fold
  double mean_r = 0.0;
  double sem_r = 0.0;
  double lambda = 1.0;
};

struct CrossValidateOptions {
  int k = 5;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  // Non-empty: pick lambda per outer fold by inner grouped CV on the
  // training rows only (lowest mean squared error).
  std::vector<double> lambda_grid;
};

EvalResult cross_validate(const ModelSpec& spec, const DesignMatrix& X,
                          const CrossValidateOptions& options = {});

struct UserScore {
  std::string user_id;
  double score = 0.0;
  bool no_model_columns = false;  // scored as bare intercept
};

// Applies a food-column model to per-user binary food vectors. Model columns
// are "food:<surface>"; a user's value is 1 iff the surface is in their set.
std::vector<UserScore> score_users(const RidgeModel& model,
                                   const std::vector<std::pair<std::string, const std::set<std::string>*>>& users);

// User-level design matrix for risk-score training: one row per user,
// binary food indicators, target = the user's county rate.
DesignMatrix build_user_design_matrix(const std::vector<UserFeatures>& users,
                                      const std::vector<std::string>& food_vocab, Target target,
                                      const std::unordered_map<std::string, HealthOutcome>& outcome_by_county,
                                      std::size_t* dropped_no_outcome = nullptr);

}  // namespace foodsig
