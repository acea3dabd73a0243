#include <doctest.h>

#include <cmath>

#include "foodsig/corpus.hpp"
#include "foodsig/csv.hpp"
#include "foodsig/error.hpp"
#include "foodsig/features.hpp"
#include "foodsig/network.hpp"
#include "foodsig/stats.hpp"
#include "foodsig/synth.hpp"
#include "test_util.hpp"

using namespace foodsig;

namespace {

SynthConfig small_config(const std::string& outdir, std::uint64_t seed) {
  SynthConfig c;
  c.seed = seed;
  c.outdir = outdir;
  c.lexicon_path = testutil::data_file("sample_lexicon.csv");
  c.n_states = 5;
  c.counties_per_state = 2;
  c.users_per_county = 30;
  c.tweets_per_user_min = 5;
  c.tweets_per_user_max = 9;
  return c;
}

struct IngestedNation {
  std::vector<TweetRecord> tweets;
  std::vector<UserProfile> profiles;
  std::unordered_map<std::string, CensusRecord> census;
  std::unordered_map<std::string, HealthOutcome> outcomes;
  GeoMapping geo;
  std::unordered_map<std::string, Gender> names;
  IngestReport report;
};

IngestedNation ingest_all(const std::string& dir) {
  IngestedNation n;
  n.tweets = ingest_tweets(dir + "/tweets.jsonl", n.report);
  n.profiles = ingest_profiles(dir + "/profiles.jsonl", n.report);
  for (auto& r : ingest_census(dir + "/census.csv", n.report)) n.census.emplace(r.region_id, r);
  for (auto& r : ingest_health(dir + "/health.csv", n.report)) n.outcomes.emplace(r.region_id, r);
  n.geo = ingest_geo(dir + "/zip_county.csv", dir + "/county_state.csv", dir + "/metro_zips.csv");
  n.names = ingest_name_table(dir + "/name_gender.csv");
  return n;
}

std::vector<UserFeatures> features_of(IngestedNation& n, const std::string& lexicon_path,
                                      bool exclude_none) {
  FoodLexicon lexicon = FoodLexicon::load_csv(lexicon_path);
  auto home_zip = assign_home_zip(n.tweets);
  assign_gender(n.profiles, n.names);
  std::unordered_map<std::string, std::vector<const TweetRecord*>> by_user;
  for (const auto& t : n.tweets) by_user[t.user_id].push_back(&t);
  FeatureInputs inputs;
  inputs.lexicon = &lexicon;
  inputs.geo = &n.geo;
  inputs.census_by_county = &n.census;
  std::vector<UserFeatures> out;
  for (const auto& p : n.profiles) {
    if (exclude_none && p.gender == Gender::none) continue;
    auto zit = home_zip.find(p.user_id);
    REQUIRE(zit != home_zip.end());
    auto f = build_user_features(p, by_user[p.user_id], zit->second, inputs);
    REQUIRE(f.has_value());
    out.push_back(std::move(*f));
  }
  return out;
}

}  // namespace

TEST_CASE("same seed twice gives byte-identical outputs") {
  testutil::TempDir a("synth_a"), b("synth_b");
  generate(small_config(a.str(), 99));
  generate(small_config(b.str(), 99));
  for (const char* name : {"tweets.jsonl", "profiles.jsonl", "census.csv", "health.csv",
                           "truth.json", "prominence.csv"})
    CHECK(read_text_file(a.file(name)) == read_text_file(b.file(name)));
  // different seed actually changes things
  testutil::TempDir c("synth_c");
  generate(small_config(c.str(), 100));
  CHECK(read_text_file(a.file("tweets.jsonl")) != read_text_file(c.file("tweets.jsonl")));
}

TEST_CASE("every generated file round-trips through ingestion with zero rejects") {
  testutil::TempDir dir("synth_rt");
  SynthTruth truth = generate(small_config(dir.str(), 5));
  IngestedNation n = ingest_all(dir.str());
  CHECK(n.report.malformed == 0);
  CHECK(n.report.rejected == 0);
  CHECK(n.profiles.size() == truth.n_users);
  CHECK(n.outcomes.size() == truth.counties.size() + 5);  // counties + states
}

TEST_CASE("planted modal zips and urban fraction are recovered exactly") {
  testutil::TempDir dir("synth_zip");
  SynthTruth truth = generate(small_config(dir.str(), 11));
  IngestedNation n = ingest_all(dir.str());
  auto home_zip = assign_home_zip(n.tweets);
  REQUIRE(home_zip.size() == truth.modal_zip.size());
  for (const auto& [user, zip] : truth.modal_zip) CHECK(home_zip.at(user) == zip);

  auto urban = label_urban(home_zip, n.geo);
  std::size_t n_urban = 0;
  for (const auto& [user, label] : urban)
    if (label == UrbanLabel::urban) ++n_urban;
  double fraction = static_cast<double>(n_urban) / static_cast<double>(urban.size());
  CHECK(fraction == truth.urban_fraction_realized);  // exact, same counts
  for (const auto& [user, flag] : truth.user_urban)
    CHECK((urban.at(user) == UrbanLabel::urban) == flag);
}

TEST_CASE("pipeline aggregates reproduce the planted county weights exactly") {
  testutil::TempDir dir("synth_w");
  SynthConfig config = small_config(dir.str(), 21);
  config.gender_none_fraction = 0.0;  // weights are planted over all county users
  SynthTruth truth = generate(config);
  IngestedNation n = ingest_all(dir.str());
  auto users = features_of(n, config.lexicon_path, false);
  auto aggs = aggregate_region(users, RegionLevel::county, 1, n.census, n.outcomes);
  REQUIRE(aggs.size() == truth.counties.size());
  for (std::size_t c = 0; c < aggs.size(); ++c) {
    const auto& truth_c = truth.counties[c];
    REQUIRE(aggs[c].region_id == truth_c.county);
    CHECK(aggs[c].food_weights.size() == truth_c.food_weights.size());
    for (const auto& [food, weight] : truth_c.food_weights)
      CHECK(aggs[c].food_weights.at(food) == weight);  // bitwise equal
  }
}

TEST_CASE("planted outcomes decompose exactly into signal, demographics, and noise") {
  testutil::TempDir dir("synth_sig");
  SynthConfig config = small_config(dir.str(), 31);
  config.gender_none_fraction = 0.0;
  SynthTruth truth = generate(config);
  IngestedNation n = ingest_all(dir.str());
  auto users = features_of(n, config.lexicon_path, false);
  auto aggs = aggregate_region(users, RegionLevel::county, 1, n.census, n.outcomes);
  REQUIRE(aggs.size() == truth.counties.size());
  for (std::size_t c = 0; c < aggs.size(); ++c) {
    const auto& ct = truth.counties[c];
    double recomputed = truth.beta_intercept;
    for (const auto& [food, weight] : aggs[c].food_weights) recomputed += truth.beta.at(food) * weight;
    recomputed += ct.demog_signal + ct.noise;
    CHECK(std::fabs(recomputed - n.outcomes.at(ct.county).obesity_rate) < 1e-9);
    double diabetes = truth.diabetes_beta_intercept;
    for (const auto& [food, weight] : aggs[c].food_weights)
      diabetes += truth.diabetes_beta_scale * truth.beta.at(food) * weight;
    diabetes += truth.diabetes_demog_scale * ct.demog_signal + ct.diabetes_noise;
    CHECK(std::fabs(diabetes - n.outcomes.at(ct.county).diabetes_rate) < 1e-9);
  }
}

TEST_CASE("sigma zero with no demographic signal makes outcomes purely linear in weights") {
  testutil::TempDir dir("synth_noiseless");
  SynthConfig config = small_config(dir.str(), 41);
  config.gender_none_fraction = 0.0;
  config.noise_sigma = 0.0;
  config.demog_signal_sd = 0.0;
  config.state_noise_sigma = 0.0;
  SynthTruth truth = generate(config);
  IngestedNation n = ingest_all(dir.str());
  auto users = features_of(n, config.lexicon_path, false);
  auto aggs = aggregate_region(users, RegionLevel::county, 1, n.census, n.outcomes);
  for (const auto& agg : aggs) {
    double recomputed = truth.beta_intercept;
    for (const auto& [food, weight] : agg.food_weights) recomputed += truth.beta.at(food) * weight;
    CHECK(std::fabs(recomputed - agg.outcome.obesity_rate) < 1e-9);
  }
}

TEST_CASE("planted network edge counts match the built graphs") {
  testutil::TempDir dir("synth_net");
  SynthConfig config = small_config(dir.str(), 51);
  SynthTruth truth = generate(config);
  IngestedNation n = ingest_all(dir.str());
  assign_gender(n.profiles, n.names);
  SocialGraph fn = build_friendship(n.profiles);
  CHECK(fn.edge_count() == truth.friendship_edges);
  SocialGraph mn = build_mention(n.tweets, n.profiles);
  CHECK(mn.edge_count() == truth.mention_edges);
}

TEST_CASE("homophily raises edge-endpoint risk assortativity") {
  auto assortativity = [](const std::string& dir, const SynthTruth& truth) {
    IngestedNation n = ingest_all(dir);
    assign_gender(n.profiles, n.names);
    SocialGraph g = build_friendship(n.profiles);
    REQUIRE(g.edge_count() > 50);
    Eigen::VectorXd x(static_cast<Eigen::Index>(2 * g.edge_count()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(2 * g.edge_count()));
    Eigen::Index k = 0;
    for (auto [u, v] : g.edges) {
      double ru = truth.user_risk.at(g.node_ids[u]);
      double rv = truth.user_risk.at(g.node_ids[v]);
      x[k] = ru;
      y[k] = rv;
      ++k;
      x[k] = rv;
      y[k] = ru;
      ++k;
    }
    return pearson(x, y);
  };
  testutil::TempDir low("synth_h0"), high("synth_h9");
  SynthConfig c0 = small_config(low.str(), 61);
  c0.homophily = 0.0;
  c0.users_per_county = 60;
  SynthConfig c9 = small_config(high.str(), 61);
  c9.homophily = 0.9;
  c9.users_per_county = 60;
  SynthTruth t0 = generate(c0);
  SynthTruth t9 = generate(c9);
  double a0 = assortativity(low.str(), t0);
  double a9 = assortativity(high.str(), t9);
  CHECK(a9 > a0 + 0.2);
}

TEST_CASE("config validation") {
  SynthConfig bad;
  bad.lexicon_path = "x";
  bad.outdir = "y";
  bad.n_states = 1;
  bad.counties_per_state = 2;  // 2 counties < 3
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.counties_per_state = 3;
  bad.homophily = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.homophily = 0.5;
  bad.noise_sigma = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("truth json round-trips") {
  testutil::TempDir dir("synth_tj");
  SynthTruth truth = generate(small_config(dir.str(), 71));
  SynthTruth back = SynthTruth::from_json(read_text_file(dir.file("truth.json")));
  CHECK(back.n_users == truth.n_users);
  CHECK(back.friendship_edges == truth.friendship_edges);
  CHECK(back.beta.size() == truth.beta.size());
  CHECK(back.counties.size() == truth.counties.size());
  CHECK(back.counties[0].obesity == truth.counties[0].obesity);
  CHECK(back.modal_zip == truth.modal_zip);
}
