#include "foodsig/modeling.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "foodsig/error.hpp"
#include "foodsig/rng.hpp"
#include "foodsig/stats.hpp"

namespace foodsig {

using nlohmann::json;

Target target_from_string(std::string_view s) {
  if (s == "obesity") return Target::obesity;
  if (s == "diabetes") return Target::diabetes;
  throw ConfigError("unknown target: '" + std::string(s) + "'");
}

std::string to_string(Target t) { return t == Target::obesity ? "obesity" : "diabetes"; }

void DesignMatrix::validate() const {
  if (values.rows() != static_cast<Eigen::Index>(row_ids.size()) ||
      values.rows() != static_cast<Eigen::Index>(groups.size()) || values.rows() != target.size())
    throw DataError("design matrix: inconsistent row counts");
  if (values.cols() != static_cast<Eigen::Index>(column_names.size()))
    throw DataError("design matrix: inconsistent column counts");
  std::unordered_set<std::string> seen;
  for (const auto& c : column_names)
    if (!seen.insert(c).second) throw DataError("design matrix: duplicate column '" + c + "'");
  if (!values.allFinite() || !target.allFinite())
    throw DataError("design matrix: non-finite values");
}

DesignMatrix DesignMatrix::select_columns(const std::vector<std::string>& prefixes) const {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < cols(); ++j)
    for (const auto& p : prefixes)
      if (column_names[static_cast<std::size_t>(j)].starts_with(p)) {
        keep.push_back(j);
        break;
      }
  if (keep.empty()) throw DataError("design matrix: no columns match the requested prefixes");
  DesignMatrix out;
  out.row_ids = row_ids;
  out.groups = groups;
  out.target = target;
  out.target_name = target_name;
  out.values.resize(rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.column_names.push_back(column_names[static_cast<std::size_t>(keep[j])]);
    out.values.col(static_cast<Eigen::Index>(j)) = values.col(keep[j]);
  }
  return out;
}

DesignMatrix DesignMatrix::select_rows(const std::vector<Eigen::Index>& idx) const {
  DesignMatrix out;
  out.column_names = column_names;
  out.target_name = target_name;
  out.values.resize(static_cast<Eigen::Index>(idx.size()), cols());
  out.target.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row_ids.push_back(row_ids[static_cast<std::size_t>(idx[i])]);
    out.groups.push_back(groups[static_cast<std::size_t>(idx[i])]);
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(idx[i]);
    out.target[static_cast<Eigen::Index>(i)] = target[idx[i]];
  }
  return out;
}

DesignMatrix build_design_matrix(const std::vector<RegionAggregate>& regions, Target target,
                                 std::size_t* dropped_incomplete) {
  std::set<std::string> foods, cats, tags;
  for (const auto& r : regions) {
    for (const auto& [k, v] : r.food_weights) foods.insert(k);
    for (const auto& [k, v] : r.category_weights) cats.insert(k);
    for (const auto& [k, v] : r.hashtag_weights) tags.insert(k);
  }
  std::vector<std::string> columns;
  columns.push_back("cal:avg_cal");
  for (const char* d : {"under_18", "over_65", "female", "afro_hispanic", "log_income"})
    columns.push_back(std::string("demog:") + d);
  for (const auto& c : cats) columns.push_back("cat:" + c);
  for (const auto& f : foods) columns.push_back("food:" + f);
  for (const auto& t : tags) columns.push_back("hashtag:" + t);
  for (const char* s : {"n_tweets", "n_retweets", "n_replies", "n_hashtags"})
    columns.push_back(std::string("stat:") + s);

  std::vector<const RegionAggregate*> keep;
  std::size_t dropped = 0;
  for (const auto& r : regions) {
    if (!r.mean_avg_cal[0] || !r.demographics) {
      ++dropped;
      continue;
    }
    keep.push_back(&r);
  }
  if (dropped_incomplete) *dropped_incomplete = dropped;

  DesignMatrix X;
  X.column_names = columns;
  X.target_name = to_string(target);
  X.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(keep.size()),
                                   static_cast<Eigen::Index>(columns.size()));
  X.target.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const RegionAggregate& r = *keep[i];
    X.row_ids.push_back(r.region_id);
    X.groups.push_back(r.state);
    auto row = X.values.row(static_cast<Eigen::Index>(i));
    Eigen::Index j = 0;
    row[j++] = *r.mean_avg_cal[0];
    const CensusRecord& d = *r.demographics;
    row[j++] = d.under_18;
    row[j++] = d.over_65;
    row[j++] = d.female;
    row[j++] = d.afro_hispanic;
    row[j++] = std::log(d.median_income);
    for (const auto& c : cats) {
      auto it = r.category_weights.find(c);
      row[j++] = it == r.category_weights.end() ? 0.0 : it->second;
    }
    for (const auto& f : foods) {
      auto it = r.food_weights.find(f);
      row[j++] = it == r.food_weights.end() ? 0.0 : it->second;
    }
    for (const auto& t : tags) {
      auto it = r.hashtag_weights.find(t);
      row[j++] = it == r.hashtag_weights.end() ? 0.0 : it->second;
    }
    row[j++] = r.stat_means[0];
    row[j++] = r.stat_means[1];
    row[j++] = r.stat_means[2];
    row[j++] = r.stat_means[3];
    X.target[static_cast<Eigen::Index>(i)] =
        target == Target::obesity ? r.outcome.obesity_rate : r.outcome.diabetes_rate;
  }
  X.validate();
  return X;
}

RidgeModel ridge_fit(const DesignMatrix& X, double lambda) {
  X.validate();
  if (X.rows() < 2) throw DataError("ridge_fit: need at least 2 rows");
  if (lambda < 0.0) throw ConfigError("ridge_fit: lambda must be >= 0");
  const Eigen::Index n = X.rows(), p = X.cols();

  RidgeModel model;
  model.columns = X.column_names;
  model.lambda = lambda;
  model.means = X.values.colwise().mean();
  model.scales.resize(p);
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < p; ++j) {
    double ss = (X.values.col(j).array() - model.means[j]).square().sum();
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd > 0.0) {
      model.scales[j] = sd;
      active.push_back(j);
    } else {
      model.scales[j] = 1.0;
      model.dropped_columns.push_back(X.column_names[static_cast<std::size_t>(j)]);
    }
  }
  const Eigen::Index pa = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd Z(n, pa);
  for (Eigen::Index j = 0; j < pa; ++j)
    Z.col(j) = (X.values.col(active[static_cast<std::size_t>(j)]).array() -
                model.means[active[static_cast<std::size_t>(j)]]) /
               model.scales[active[static_cast<std::size_t>(j)]];
  double y_mean = X.target.mean();
  Eigen::VectorXd yc = X.target.array() - y_mean;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(pa);
  if (pa > 0) {
    if (lambda > 0.0) {
      Eigen::MatrixXd A = Z.transpose() * Z;
      A.diagonal().array() += lambda;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
      if (ldlt.info() != Eigen::Success)
        throw DataError("ridge_fit: normal equations factorization failed");
      beta = ldlt.solve(Z.transpose() * yc);
    } else {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Z);
      if (cod.rank() < pa) model.rank_deficient = true;  // minimum-norm solution
      beta = cod.solve(yc);
    }
  }

  model.std_coefficients = Eigen::VectorXd::Zero(p);
  model.coefficients = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < pa; ++j) {
    Eigen::Index col = active[static_cast<std::size_t>(j)];
    model.std_coefficients[col] = beta[j];
    model.coefficients[col] = beta[j] / model.scales[col];
  }
  model.intercept = y_mean - model.coefficients.dot(model.means);
  return model;
}

Eigen::VectorXd RidgeModel::predict(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  if (X.cols() != coefficients.size())
    throw DataError("predict: column count mismatch");
  return (X * coefficients).array() + intercept;
}

std::string RidgeModel::to_json() const {
  json j;
  j["columns"] = columns;
  j["coefficients"] = std::vector<double>(coefficients.begin(), coefficients.end());
  j["std_coefficients"] = std::vector<double>(std_coefficients.begin(), std_coefficients.end());
  j["intercept"] = intercept;
  j["lambda"] = lambda;
  j["means"] = std::vector<double>(means.begin(), means.end());
  j["scales"] = std::vector<double>(scales.begin(), scales.end());
  j["dropped_columns"] = dropped_columns;
  j["rank_deficient"] = rank_deficient;
  return j.dump(2) + "\n";
}

RidgeModel RidgeModel::from_json(const std::string& text) {
  json j = json::parse(text);
  RidgeModel m;
  m.columns = j.at("columns").get<std::vector<std::string>>();
  auto vec = [](const json& a) {
    auto v = a.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
  };
  m.coefficients = vec(j.at("coefficients"));
  m.std_coefficients = vec(j.at("std_coefficients"));
  m.intercept = j.at("intercept").get<double>();
  m.lambda = j.at("lambda").get<double>();
  m.means = vec(j.at("means"));
  m.scales = vec(j.at("scales"));
  m.dropped_columns = j.at("dropped_columns").get<std::vector<std::string>>();
  m.rank_deficient = j.at("rank_deficient").get<bool>();
  return m;
}

std::vector<int> grouped_folds(const std::vector<std::string>& groups, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("grouped_folds: k must be >= 2");
  std::vector<std::string> states(groups.begin(), groups.end());
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  if (static_cast<int>(states.size()) < k)
    throw DataError("grouped_folds: " + std::to_string(states.size()) + " states < k=" +
                    std::to_string(k));
  Rng rng(derive_seed(seed, stream_label("grouped_folds")));
  rng.shuffle(states);
  std::unordered_map<std::string, int> fold_of_state;
  for (std::size_t i = 0; i < states.size(); ++i)
    fold_of_state.emplace(states[i], static_cast<int>(i % static_cast<std::size_t>(k)));
  std::vector<int> folds;
  folds.reserve(groups.size());
  for (const auto& g : groups) folds.push_back(fold_of_state.at(g));
  return folds;
}

const std::vector<ModelSpec>& standard_model_specs() {
  static const std::vector<ModelSpec> specs = {
      {"Demog", {"demog:"}},
      {"Liwc", {"cat:"}},
      {"Calories", {"cal:"}},
      {"Food", {"food:"}},
      {"Liwc-Demog", {"cat:", "demog:"}},
      {"Food-Demog", {"food:", "demog:"}},
      {"HashtagBaseline", {"hashtag:"}},
      {"TweetStatsBaseline", {"stat:"}},
  };
  return specs;
}

const ModelSpec& model_spec(std::string_view name) {
  for (const auto& s : standard_model_specs())
    if (s.name == name) return s;
  throw ConfigError("unknown model spec: '" + std::string(name) + "'");
}

namespace {

// Inner grouped CV on the training rows only; lowest mean squared error wins.
double pick_lambda(const DesignMatrix& train, const CrossValidateOptions& options) {
  std::set<std::string> states(train.groups.begin(), train.groups.end());
  int k_inner = std::min<int>(options.k, static_cast<int>(states.size()));
  if (k_inner < 2) return options.lambda;
  std::vector<int> folds =
      grouped_folds(train.groups, k_inner, derive_seed(options.seed, stream_label("inner")));
  double best_lambda = options.lambda_grid.front();
  double best_mse = std::numeric_limits<double>::infinity();
  for (double lam : options.lambda_grid) {
    double sse = 0.0;
    std::size_t count = 0;
    for (int f = 0; f < k_inner; ++f) {
      std::vector<Eigen::Index> tr, te;
      for (std::size_t i = 0; i < folds.size(); ++i)
        (folds[i] == f ? te : tr).push_back(static_cast<Eigen::Index>(i));
      if (te.empty() || tr.size() < 2) continue;
      RidgeModel m = ridge_fit(train.select_rows(tr), lam);
      DesignMatrix test = train.select_rows(te);
      Eigen::VectorXd pred = m.predict(test.values);
      sse += (pred - test.target).squaredNorm();
      count += te.size();
    }
    if (count == 0) continue;
    double mse = sse / static_cast<double>(count);
    if (mse < best_mse) {
      best_mse = mse;
      best_lambda = lam;
    }
  }
  return best_lambda;
}

}  // namespace

EvalResult cross_validate(const ModelSpec& spec, const DesignMatrix& X,
                          const CrossValidateOptions& options) {
  DesignMatrix sub = X.select_columns(spec.column_prefixes);
  // Canonical row order, so shard order cannot change fold contents or sums.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(sub.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return sub.row_ids[static_cast<std::size_t>(a)] < sub.row_ids[static_cast<std::size_t>(b)];
  });
  DesignMatrix canon = sub.select_rows(order);

  std::vector<int> folds = grouped_folds(canon.groups, options.k, options.seed);
  EvalResult result;
  result.model_name = spec.name;
  result.target_name = canon.target_name;
  result.lambda = options.lambda;
  for (int f = 0; f < options.k; ++f) {
    std::vector<Eigen::Index> tr, te;
    for (std::size_t i = 0; i < folds.size(); ++i)
      (folds[i] == f ? te : tr).push_back(static_cast<Eigen::Index>(i));
    if (te.size() < 3)
      throw DataError("cross_validate: fold " + std::to_string(f) + " has " +
                      std::to_string(te.size()) + " rows (< 3, correlation undefined)");
    DesignMatrix train = canon.select_rows(tr);
    DesignMatrix test = canon.select_rows(te);
    double lam = options.lambda;
    if (!options.lambda_grid.empty()) {
      CrossValidateOptions inner = options;
      inner.seed = derive_seed(options.seed, stream_label("fold"), static_cast<std::uint64_t>(f));
      lam = pick_lambda(train, inner);
    }
    RidgeModel m = ridge_fit(train, lam);
    Eigen::VectorXd pred = m.predict(test.values);
    result.fold_r.push_back(pearson(pred, test.target));
  }
  Eigen::Map<const Eigen::VectorXd> rs(result.fold_r.data(),
                                       static_cast<Eigen::Index>(result.fold_r.size()));
  result.mean_r = rs.mean();
  result.sem_r = sem(rs);
  return result;
}

std::vector<UserScore> score_users(
    const RidgeModel& model,
    const std::vector<std::pair<std::string, const std::set<std::string>*>>& users) {
  // Model columns are food indicators; precompute the surface per column.
  std::vector<std::string> surfaces;
  surfaces.reserve(model.columns.size());
  for (const auto& c : model.columns) {
    if (!c.starts_with("food:"))
      throw ConfigError("score_users: model has non-food column '" + c + "'");
    surfaces.push_back(c.substr(5));
  }
  std::vector<UserScore> out;
  out.reserve(users.size());
  for (const auto& [id, foods] : users) {
    UserScore s;
    s.user_id = id;
    double acc = model.intercept;
    bool any = false;
    for (std::size_t j = 0; j < surfaces.size(); ++j) {
      if (foods && foods->contains(surfaces[j])) {
        acc += model.coefficients[static_cast<Eigen::Index>(j)];
        any = true;
      }
    }
    s.score = acc;
    s.no_model_columns = !any;
    out.push_back(std::move(s));
  }
  return out;
}

DesignMatrix build_user_design_matrix(
    const std::vector<UserFeatures>& users, const std::vector<std::string>& food_vocab,
    Target target, const std::unordered_map<std::string, HealthOutcome>& outcome_by_county,
    std::size_t* dropped_no_outcome) {
  std::vector<const UserFeatures*> keep;
  std::size_t dropped = 0;
  for (const auto& u : users) {
    if (outcome_by_county.contains(u.county))
      keep.push_back(&u);
    else
      ++dropped;
  }
  if (dropped_no_outcome) *dropped_no_outcome = dropped;
  DesignMatrix X;
  X.target_name = to_string(target);
  for (const auto& f : food_vocab) X.column_names.push_back("food:" + f);
  X.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(keep.size()),
                                   static_cast<Eigen::Index>(food_vocab.size()));
  X.target.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const UserFeatures& u = *keep[i];
    X.row_ids.push_back(u.user_id);
    X.groups.push_back(u.state);
    for (std::size_t j = 0; j < food_vocab.size(); ++j)
      if (u.food_indicators.contains(food_vocab[j]))
        X.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    const HealthOutcome& h = outcome_by_county.at(u.county);
    X.target[static_cast<Eigen::Index>(i)] =
        target == Target::obesity ? h.obesity_rate : h.diabetes_rate;
  }
  X.validate();
  return X;
}

}  // namespace foodsig
