// Acceptance suite: every criterion prints one pass/fail line; the binary
// exits nonzero if any fails. Thresholds are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "foodsig/cli.hpp"
#include "foodsig/corpus.hpp"
#include "foodsig/csv.hpp"
#include "foodsig/error.hpp"
#include "foodsig/lexicon.hpp"
#include "foodsig/modeling.hpp"
#include "foodsig/network.hpp"
#include "foodsig/rng.hpp"
#include "foodsig/stats.hpp"
#include "foodsig/synth.hpp"
#include "foodsig/textfilter.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace foodsig;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> notes;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------- criterion 1

Check matcher_oracle_equivalence() {
  Check check;
  auto start = std::chrono::steady_clock::now();
  std::vector<std::string> words = {"ba", "ce", "di", "fo", "gu", "ha", "ki", "lo",
                                    "me", "nu", "pa", "qi", "ro", "su", "tu", "vi"};
  Rng rng(20250809);
  std::vector<FoodEntry> entries;
  std::unordered_set<std::string> seen;
  int multi = 0;
  while (entries.size() < 50) {
    bool want_multi = multi < 10;
    std::size_t len = want_multi ? 2 + rng.below(3) : 1 + rng.below(4);
    std::string surface;
    for (std::size_t k = 0; k < len; ++k) {
      if (k) surface += ' ';
      surface += words[rng.below(words.size())];
    }
    if (!seen.insert(surface).second) continue;
    if (len > 1) ++multi;
    entries.push_back({surface, {}, static_cast<double>(1 + rng.below(600)), FoodClass::solid});
  }
  FoodLexicon lex = FoodLexicon::from_entries(std::move(entries));

  std::size_t agreements = 0;
  const int n_texts = 1000;
  for (int t = 0; t < n_texts; ++t) {
    std::size_t n = rng.below(24);
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < n; ++i) tokens.push_back(words[rng.below(words.size())]);
    MatchResult got = match_tokens(tokens, lex);
    auto expected = oracle::brute_force_matches(tokens, lex);
    bool same = got.matches.size() == expected.size();
    if (same)
      for (std::size_t i = 0; i < expected.size(); ++i)
        same = same && got.matches[i].token_offset == expected[i].first &&
               got.matches[i].token_count == expected[i].second;
    if (same) ++agreements;
  }
  double elapsed = seconds_since(start);
  check.require(agreements == n_texts, "agreement on " + std::to_string(agreements) + "/1000");
  check.require(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s >= 5s");
  check.note("1000/1000 texts, " + format_double(elapsed) + "s");
  return check;
}

// ---------------------------------------------------------------- criterion 2

Check ridge_against_gradient_oracle() {
  Check check;
  double worst = 0.0;
  for (int problem = 0; problem < 20; ++problem) {
    Rng rng(500 + static_cast<std::uint64_t>(problem));
    DesignMatrix X;
    X.values.resize(50, 5);
    X.target.resize(50);
    for (Eigen::Index i = 0; i < 50; ++i) {
      X.row_ids.push_back("r" + std::to_string(i));
      X.groups.push_back("s" + std::to_string(i % 10));
      for (Eigen::Index j = 0; j < 5; ++j) X.values(i, j) = rng.normal(0, 1 + j);
      X.target[i] = X.values(i, 0) * 1.5 - X.values(i, 3) * 0.7 + rng.normal();
    }
    for (int j = 0; j < 5; ++j) X.column_names.push_back("food:c" + std::to_string(j));
    X.target_name = "obesity";

    RidgeModel model = ridge_fit(X, 1.0);
    Eigen::VectorXd oracle_beta = oracle::ridge_gradient_descent(X.values, X.target, 1.0);
    for (Eigen::Index j = 0; j < 5; ++j)
      worst = std::max(worst, std::fabs(model.std_coefficients[j] - oracle_beta[j]));

    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      double norm = ridge_fit(X, lambda).std_coefficients.norm();
      check.require(norm <= prev + 1e-12, "path norm rose at lambda=" + format_double(lambda));
      prev = norm;
    }
  }
  check.require(worst < 1e-6, "worst coefficient gap " + format_double(worst));
  check.note("20 problems, worst |closed-form - GD| = " + format_double(worst));
  return check;
}

// ---------------------------------------------------------------- criterion 3

Check grouped_cv_never_splits_states() {
  Check check;
  // 51 states, 346 counties: the first 40 states carry 7, the rest 6
  std::vector<std::string> groups;
  for (int s = 0; s < 51; ++s) {
    int counties = s < 40 ? 7 : 6;
    for (int c = 0; c < counties; ++c) groups.push_back("S" + std::to_string(s));
  }
  check.require(groups.size() == 346, "fixture should have 346 counties");
  std::size_t violations = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::vector<int> folds = grouped_folds(groups, 5, seed);
    std::map<std::string, std::set<int>> folds_of_state;
    for (std::size_t i = 0; i < groups.size(); ++i) folds_of_state[groups[i]].insert(folds[i]);
    for (const auto& [state, fold_set] : folds_of_state)
      if (fold_set.size() != 1) ++violations;
  }
  check.require(violations == 0, std::to_string(violations) + " state/fold violations");
  check.note("100 seeded draws, 0 states spanning folds");
  return check;
}

// ------------------------------------------------------- criteria 4 and 5

struct NationContext {
  std::string dir;
  bool built = false;
};

int cli(std::vector<std::string> args) { return run_cli(args); }

Check end_to_end_signal_recovery(NationContext& nation) {
  Check check;
  auto start = std::chrono::steady_clock::now();
  const std::string dir = nation.dir;
  std::string lexicon = testutil::data_file("sample_lexicon.csv");
  int rc = cli({"synth", "--seed", "20250809", "--outdir", dir, "--set", "lexicon=" + lexicon,
                "--set", "n_states=51", "--set", "counties_per_state=6", "--set",
                "users_per_county=100"});
  check.require(rc == 0, "synth exited " + std::to_string(rc));
  rc = cli({"ingest", "--config", dir + "/pipeline.conf"});
  check.require(rc == 0, "ingest exited " + std::to_string(rc));
  rc = cli({"features", "--config", dir + "/pipeline.conf", "--set",
            "category_lexicon=" + testutil::data_file("sample_categories.csv"), "--set",
            "profile_filters=" + testutil::data_file("filters/cooking.txt") + "," +
                testutil::data_file("filters/family.txt"),
            "--set", "hashtag_filters=" + testutil::data_file("filters/fatproblems.txt")});
  check.require(rc == 0, "features exited " + std::to_string(rc));
  rc = cli({"fit", "--config", dir + "/pipeline.conf"});
  check.require(rc == 0, "fit exited " + std::to_string(rc));
  if (!check.ok) return check;
  nation.built = true;

  SynthTruth truth = SynthTruth::from_json(read_text_file(dir + "/truth.json"));
  check.note("realized R2 obesity " + format_double(truth.r2_obesity) + ", diabetes " +
             format_double(truth.r2_diabetes));

  CsvTable t = read_csv(dir + "/fit_results.csv");
  std::size_t c_model = t.col("model"), c_target = t.col("target"), c_mean = t.col("mean_r");
  std::map<std::string, double> mean_r;
  for (const auto& row : t.rows) mean_r[row[c_model] + "/" + row[c_target]] = std::stod(row[c_mean]);
  for (const std::string target : {"obesity", "diabetes"}) {
    double calories = mean_r.at("Calories/" + target);
    double food = mean_r.at("Food/" + target);
    double food_demog = mean_r.at("Food-Demog/" + target);
    check.require(calories >= 0.5, target + ": Calories r " + format_double(calories) + " < 0.5");
    check.require(food >= 0.8, target + ": Food r " + format_double(food) + " < 0.8");
    check.require(food > calories, target + ": Food <= Calories");
    check.require(food_demog >= food, target + ": Food-Demog < Food");
    check.note(target + ": Calories " + format_double(calories) + ", Food " + format_double(food) +
               ", Food-Demog " + format_double(food_demog));
  }
  double elapsed = seconds_since(start);
  check.require(elapsed < 180.0, "runtime " + std::to_string(elapsed) + "s >= 180s");
  check.note("full run " + format_double(elapsed) + "s");
  return check;
}

Check table1_analogue(const NationContext& nation) {
  Check check;
  check.require(nation.built, "nation unavailable (criterion 4 failed)");
  if (!check.ok) return check;
  int rc = cli({"correlate", "--config", nation.dir + "/pipeline.conf"});
  check.require(rc == 0, "correlate exited " + std::to_string(rc));
  if (!check.ok) return check;
  CsvTable t = read_csv(nation.dir + "/state_correlations.csv");
  std::size_t c_class = t.col("class"), c_target = t.col("target"), c_r = t.col("pearson"),
              c_p = t.col("p_pearson");
  bool found = false;
  for (const auto& row : t.rows) {
    if (row[c_class] != "all") continue;
    double r = std::stod(row[c_r]);
    double p = std::stod(row[c_p]);
    check.note("all/" + row[c_target] + ": r " + format_double(r) + ", p " + format_double(p));
    if (row[c_target] == "obesity") {
      found = true;
      check.require(r >= 0.7, "all-row r " + format_double(r) + " < 0.7");
      check.require(p < 1e-4, "all-row p " + format_double(p) + " >= 1e-4");
    }
  }
  check.require(found, "no all/obesity row in state_correlations.csv");
  return check;
}

// ---------------------------------------------------------------- criterion 6

Check statistics_oracles_and_coverage() {
  Check check;
  Rng rng(606);
  double worst_r = 0.0, worst_rho = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 10 + rng.below(80);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal(1.0, 2.0);
      y[i] = 0.4 * x[i] + rng.normal(0.0, 1.0);
    }
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n));
    Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
    worst_r = std::max(worst_r, std::fabs(pearson(xv, yv) - oracle::pearson_textbook(x, y)));
    worst_rho = std::max(worst_rho, std::fabs(spearman(xv, yv) - oracle::spearman_textbook(x, y)));
  }
  check.require(worst_r < 1e-12, "pearson gap " + format_double(worst_r));
  check.require(worst_rho < 1e-12, "spearman gap " + format_double(worst_rho));

  auto mean_stat = [](const Eigen::VectorXd& v, const Eigen::VectorXd&) { return v.mean(); };
  int covered = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    Rng trng(derive_seed(4242, static_cast<std::uint64_t>(trial)));
    Eigen::VectorXd sample(200);
    for (Eigen::Index i = 0; i < 200; ++i) sample[i] = trng.normal();
    BootstrapCI ci = bootstrap_ci(sample, sample, mean_stat, 1000,
                                  derive_seed(999, static_cast<std::uint64_t>(trial)));
    if (ci.lo <= 0.0 && 0.0 <= ci.hi) ++covered;
  }
  double coverage = 100.0 * covered / trials;
  check.require(coverage >= 92.0 && coverage <= 98.0,
                "coverage " + format_double(coverage) + "% outside [92, 98]");
  check.note("oracle gaps r " + format_double(worst_r) + " rho " + format_double(worst_rho) +
             "; coverage " + format_double(coverage) + "%");
  return check;
}

// ---------------------------------------------------------------- criterion 7

Check activation_threshold_model() {
  Check check;
  PlantedActivationGraph planted = generate_homophily_graph(20000, 0.8, 6.0, 20250809, 20);
  ActivationCurve curve = activation_analysis(planted.graph, planted.scores, {});
  check.require(curve.points.size() >= 5, "curve shorter than x = 4");
  if (!check.ok) return check;
  std::string ps;
  for (std::size_t x = 0; x <= 4; ++x) {
    check.require(curve.points[x].n > 0, "empty bucket at x=" + std::to_string(x));
    if (x > 0)
      check.require(curve.points[x].p >= curve.points[x - 1].p,
                    "p dropped at x=" + std::to_string(x));
    ps += (x ? " " : "") + format_double(curve.points[x].p);
  }
  check.note("planted p(0..4): " + ps);

  // label-shuffled null: p(x) flat, every bucket CI covering the null p(0)
  std::vector<bool> active = active_flags(planted.graph, planted.scores, 90.0);
  Rng shuffle_rng(77);
  for (std::size_t i = active.size(); i > 1; --i) {
    std::size_t j = shuffle_rng.below(i);
    bool tmp = active[i - 1];
    active[i - 1] = active[j];
    active[j] = tmp;
  }
  ActivationCurve null_curve = activation_from_flags(planted.graph, active, {});
  auto counts = active_neighbor_counts(planted.graph, active, {});
  double null_p0 = null_curve.points[0].p;
  auto mean_stat = [](const Eigen::VectorXd& v, const Eigen::VectorXd&) { return v.mean(); };
  std::string null_ps;
  for (std::size_t x = 0; x <= 4; ++x) {
    std::vector<double> members;
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i] == x) members.push_back(active[i] ? 1.0 : 0.0);
    check.require(members.size() >= 3, "null bucket too small at x=" + std::to_string(x));
    if (members.size() < 3) continue;
    Eigen::Map<const Eigen::VectorXd> mv(members.data(),
                                         static_cast<Eigen::Index>(members.size()));
    BootstrapCI ci = bootstrap_ci(mv, mv, mean_stat, 1000,
                                  derive_seed(31337, static_cast<std::uint64_t>(x)));
    check.require(ci.lo <= null_p0 && null_p0 <= ci.hi,
                  "null p(" + std::to_string(x) + ") CI [" + format_double(ci.lo) + "," +
                      format_double(ci.hi) + "] misses p(0)=" + format_double(null_p0));
    null_ps += (x ? " " : "") + format_double(ci.point);
  }
  check.note("shuffled p(0..4): " + null_ps);

  // same-state ablation can only lower per-node active-neighbour counts
  std::vector<bool> planted_active = active_flags(planted.graph, planted.scores, 90.0);
  auto before = active_neighbor_counts(planted.graph, planted_active, {});
  ActivationOptions ablated;
  ablated.drop_same_state = true;
  ablated.user_state = &planted.user_state;
  auto after = active_neighbor_counts(planted.graph, planted_active, ablated);
  std::size_t raised = 0;
  for (std::size_t i = 0; i < before.size(); ++i)
    if (after[i] > before[i]) ++raised;
  check.require(raised == 0, std::to_string(raised) + " nodes gained active neighbours");
  // implied cumulative form: #{x_u >= x} never increases
  std::size_t max_x = 0;
  for (std::size_t i = 0; i < before.size(); ++i) max_x = std::max(max_x, before[i]);
  for (std::size_t x = 0; x <= max_x; ++x) {
    std::size_t nb = 0, na = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (before[i] >= x) ++nb;
      if (after[i] >= x) ++na;
    }
    check.require(na <= nb, "cumulative count rose at x=" + std::to_string(x));
  }
  return check;
}

// ---------------------------------------------------------------- criterion 8

Check cliqueness_gradient_and_null() {
  Check check;
  PlantedCliquenessGraph planted = generate_overlap_gradient_graph(400, 20250809);
  CliquenessOptions options;
  options.bin_edges = planted.bin_edges;
  options.bootstrap_iters = 1000;
  options.seed = 11;
  JaccardBinReport report = cliqueness_analysis(planted.graph, planted.fractions, options);
  std::size_t total = 0;
  for (const auto& bin : report.bins) total += bin.n_links;
  check.require(total == report.total_links, "bin counts do not sum to the link count");
  std::string rs;
  for (std::size_t b = 0; b < 4; ++b) {
    check.require(report.bins[b].defined, "bin " + std::to_string(b) + " undefined");
    if (b > 0 && report.bins[b].defined && report.bins[b - 1].defined)
      check.require(report.bins[b].r >= report.bins[b - 1].r,
                    "r dropped at bin " + std::to_string(b));
    rs += (b ? " " : "") + format_double(report.bins[b].r);
  }
  check.note("gradient r by bin: " + rs);

  PlantedCliquenessGraph null_graph = generate_overlap_gradient_graph(
      400, 424242, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  JaccardBinReport null_report = cliqueness_analysis(null_graph.graph, null_graph.fractions,
                                                     options);
  for (std::size_t b = 0; b < null_report.bins.size(); ++b) {
    if (!null_report.bins[b].defined) continue;
    check.require(null_report.bins[b].ci.lo <= 0.0 && 0.0 <= null_report.bins[b].ci.hi,
                  "null bin " + std::to_string(b) + " CI excludes 0");
  }
  return check;
}

// ---------------------------------------------------------------- criterion 9

std::map<std::string, std::string> snapshot_dir(const std::string& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    out[std::filesystem::relative(entry.path(), dir).string()] =
        read_text_file(entry.path().string());
  }
  return out;
}

Check determinism_across_workers() {
  Check check;
  testutil::TempDir scratch("acceptance_det");
  const std::string dir = scratch.str() + "/run";
  auto run_chain = [&](const std::string& workers) {
    std::filesystem::remove_all(dir);
    std::string lexicon = testutil::data_file("sample_lexicon.csv");
    std::vector<std::vector<std::string>> commands = {
        {"synth", "--seed", "13", "--outdir", dir, "--set", "lexicon=" + lexicon, "--set",
         "n_states=8", "--set", "counties_per_state=2", "--set", "users_per_county=40"},
        {"ingest", "--config", dir + "/pipeline.conf"},
        {"match", "--config", dir + "/pipeline.conf"},
        {"features", "--config", dir + "/pipeline.conf", "--set",
         "category_lexicon=" + testutil::data_file("sample_categories.csv"), "--set",
         "profile_filters=" + testutil::data_file("filters/cooking.txt"), "--set",
         "hashtag_filters=" + testutil::data_file("filters/fatproblems.txt")},
        {"correlate", "--config", dir + "/pipeline.conf"},
        {"fit", "--config", dir + "/pipeline.conf", "--set", "k=4"},
        {"score", "--config", dir + "/pipeline.conf"},
        {"interests", "--config", dir + "/pipeline.conf"},
        {"distinguish", "--config", dir + "/pipeline.conf"},
        {"network", "activation", "--config", dir + "/pipeline.conf"},
        {"network", "cliqueness", "--config", dir + "/pipeline.conf", "--set",
         "bootstrap_iters=200"},
    };
    for (auto cmd : commands) {
      cmd.push_back("--workers");
      cmd.push_back(workers);
      int rc = cli(cmd);
      if (rc != 0) {
        check.require(false, cmd[0] + " exited " + std::to_string(rc) + " (workers=" + workers + ")");
        return std::map<std::string, std::string>{};
      }
    }
    return snapshot_dir(dir);
  };
  auto first = run_chain("1");
  if (!check.ok) return check;
  auto second = run_chain("1");
  auto parallel = run_chain("8");
  if (!check.ok) return check;
  check.require(!first.empty(), "no outputs produced");
  check.require(first == second, "rerun with 1 worker changed outputs");
  if (first != parallel) {
    for (const auto& [name, bytes] : first) {
      auto it = parallel.find(name);
      if (it == parallel.end())
        check.require(false, "missing file with 8 workers: " + name);
      else if (it->second != bytes)
        check.require(false, "bytes differ with 8 workers: " + name);
    }
    check.require(false, "8-worker outputs differ");
  }
  check.note(std::to_string(first.size()) + " files byte-identical across reruns and workers");
  return check;
}

int run_criterion(int index, const std::string& name, Check (*fn)()) {
  auto start = std::chrono::steady_clock::now();
  Check check;
  try {
    check = fn();
  } catch (const std::exception& e) {
    check.ok = false;
    check.notes.push_back(std::string("exception: ") + e.what());
  }
  std::printf("[%d] %-44s %s  (%.1fs)\n", index, name.c_str(), check.ok ? "PASS" : "FAIL",
              seconds_since(start));
  for (const auto& note : check.notes) std::printf("      %s\n", note.c_str());
  return check.ok ? 0 : 1;
}

template <class Fn>
int run_criterion_with(int index, const std::string& name, Fn fn) {
  auto start = std::chrono::steady_clock::now();
  Check check;
  try {
    check = fn();
  } catch (const std::exception& e) {
    check.ok = false;
    check.notes.push_back(std::string("exception: ") + e.what());
  }
  std::printf("[%d] %-44s %s  (%.1fs)\n", index, name.c_str(), check.ok ? "PASS" : "FAIL",
              seconds_since(start));
  for (const auto& note : check.notes) std::printf("      %s\n", note.c_str());
  return check.ok ? 0 : 1;
}

}  // namespace

int main() {
  int failures = 0;
  testutil::TempDir nation_dir("acceptance_nation");
  NationContext nation;
  nation.dir = nation_dir.str() + "/nation";

  failures += run_criterion(1, "matcher oracle equivalence (1000 texts)",
                            matcher_oracle_equivalence);
  failures += run_criterion(2, "ridge closed form vs gradient descent", ridge_against_gradient_oracle);
  failures += run_criterion(3, "grouped CV never splits states", grouped_cv_never_splits_states);
  failures += run_criterion_with(4, "end-to-end signal recovery",
                                 [&] { return end_to_end_signal_recovery(nation); });
  failures += run_criterion_with(5, "state correlation analogue",
                                 [&] { return table1_analogue(nation); });
  failures += run_criterion(6, "statistics oracles and bootstrap coverage",
                            statistics_oracles_and_coverage);
  failures += run_criterion(7, "threshold activation model", activation_threshold_model);
  failures += run_criterion(8, "jaccard clique-ness gradient", cliqueness_gradient_and_null);
  failures += run_criterion(9, "seeded determinism across workers", determinism_across_workers);

  if (failures == 0)
    std::printf("all 9 acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
