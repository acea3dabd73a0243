#include "foodsig/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "foodsig/corpus.hpp"
#include "foodsig/csv.hpp"
#include "foodsig/error.hpp"
#include "foodsig/features.hpp"
#include "foodsig/lexicon.hpp"
#include "foodsig/modeling.hpp"
#include "foodsig/network.hpp"
#include "foodsig/parallel.hpp"
#include "foodsig/stats.hpp"
#include "foodsig/strutil.hpp"
#include "foodsig/synth.hpp"
#include "foodsig/textfilter.hpp"

namespace foodsig {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "foodsig 0.1.0";

// ---------------------------------------------------------------------------
// configuration

struct Config {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.contains(key); }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.empty())
      throw ConfigError("missing required config key '" + key + "'");
    return it->second;
  }

  double num(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': bad number '" + it->second + "'");
    }
  }

  long integer(const std::string& key, long fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      return std::stol(it->second);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': bad integer '" + it->second + "'");
    }
  }

  std::uint64_t seed() const {
    auto it = kv.find("seed");
    if (it == kv.end()) throw ConfigError("seed is mandatory (no wall-clock defaults)");
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
      throw ConfigError("bad seed '" + it->second + "'");
    }
  }

  bool flag(const std::string& key, bool fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': bad boolean '" + v + "'");
  }

  std::vector<std::string> list(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) return {};
    std::vector<std::string> out;
    for (auto& part : split(it->second, ',')) {
      std::string p(trim(part));
      if (!p.empty()) out.push_back(std::move(p));
    }
    return out;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) return fallback;
    std::vector<double> out;
    for (auto& part : list(key)) {
      try {
        out.push_back(std::stod(part));
      } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': bad number '" + part + "'");
      }
    }
    return out;
  }

  std::string outdir() const { return require("outdir"); }
  int workers() const { return static_cast<int>(integer("workers", 1)); }
};

void load_config_file(Config& cfg, const std::string& path) {
  std::string text = read_text_file(path);
  std::size_t lineno = 0;
  for (const auto& raw : split(text, '\n')) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    cfg.kv[key] = value;
  }
}

void apply_overrides(Config& cfg, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    std::string key(trim(std::string_view(s).substr(0, eq)));
    std::string value(trim(std::string_view(s).substr(eq + 1)));
    if (key.empty()) throw ConfigError("--set expects key=value, got '" + s + "'");
    cfg.kv[key] = value;
  }
}

// The manifest captures everything needed to reproduce a run. The worker
// count is a runtime knob that cannot change outputs, so it is excluded.
void write_manifest(const Config& cfg, const std::string& subcommand) {
  std::map<std::string, std::string> echo(cfg.kv.begin(), cfg.kv.end());
  echo.erase("workers");
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ull;
  };
  for (const auto& [k, v] : echo) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  json j;
  j["subcommand"] = subcommand;
  j["seed"] = cfg.seed();
  j["config"] = json(echo);
  j["config_hash"] = std::string(hex);
  j["version"] = kVersion;
  std::string name = subcommand;
  std::replace(name.begin(), name.end(), ' ', '_');
  write_text_file(cfg.outdir() + "/manifest_" + name + ".json", j.dump(2) + "\n");
}

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

// ---------------------------------------------------------------------------
// shared pipeline stages

struct Corpus {
  std::vector<TweetRecord> tweets;
  std::vector<UserProfile> profiles;
  std::unordered_map<std::string, CensusRecord> census;
  std::unordered_map<std::string, HealthOutcome> outcomes;
  GeoMapping geo;
  std::unordered_map<std::string, Gender> names;
  json report = json::object();
};

enum LoadBits : unsigned {
  kTweets = 1,
  kProfiles = 2,
  kCensus = 4,
  kHealth = 8,
  kGeo = 16,
  kNames = 32,
};

Corpus load_corpus(const Config& cfg, unsigned bits) {
  Corpus c;
  auto report_of = [](const IngestReport& r) {
    json j;
    j["lines"] = r.lines;
    j["records"] = r.records;
    j["malformed"] = r.malformed;
    j["rejected"] = r.rejected;
    j["messages"] = r.messages;
    return j;
  };
  if (bits & kTweets) {
    IngestReport r;
    c.tweets = ingest_tweets(cfg.require("tweets"), r);
    c.report["tweets"] = report_of(r);
  }
  if (bits & kProfiles) {
    IngestReport r;
    c.profiles = ingest_profiles(cfg.require("profiles"), r);
    c.report["profiles"] = report_of(r);
  }
  if (bits & kCensus) {
    IngestReport r;
    for (auto& rec : ingest_census(cfg.require("census"), r)) c.census.emplace(rec.region_id, rec);
    c.report["census"] = report_of(r);
  }
  if (bits & kHealth) {
    IngestReport r;
    for (auto& rec : ingest_health(cfg.require("health"), r))
      c.outcomes.emplace(rec.region_id, rec);
    c.report["health"] = report_of(r);
  }
  if (bits & kGeo)
    c.geo = ingest_geo(cfg.require("zip_county"), cfg.require("county_state"),
                       cfg.require("metro_zips"));
  if (bits & kNames) c.names = ingest_name_table(cfg.require("name_gender"));
  return c;
}

std::vector<KeywordFilter> load_filters(const Config& cfg) {
  std::vector<KeywordFilter> filters;
  for (const auto& path : cfg.list("profile_filters"))
    filters.push_back(load_filter(path, FilterTarget::profile_text));
  for (const auto& path : cfg.list("hashtag_filters"))
    filters.push_back(load_filter(path, FilterTarget::hashtags));
  for (const auto& path : cfg.list("tweet_filters"))
    filters.push_back(load_filter(path, FilterTarget::tweet_text));
  return filters;
}

struct FeatureBuild {
  std::vector<UserFeatures> users;
  GenderReport gender_report;
  std::size_t skipped_no_zip = 0;
  std::size_t skipped_no_census = 0;
  std::unordered_map<std::string, UrbanLabel> urban;
  std::map<std::string, double> area_means;
  std::map<std::string, std::set<std::string>> interest_areas;  // user -> areas
};

FeatureBuild build_all_features(Corpus& corpus, const Config& cfg, bool exclude_none) {
  FeatureBuild out;
  FoodLexicon lexicon = FoodLexicon::load_csv(cfg.require("lexicon"));
  std::optional<CategoryLexicon> categories;
  if (cfg.has("category_lexicon"))
    categories = CategoryLexicon::load_csv(cfg.require("category_lexicon"));
  std::vector<KeywordFilter> filters = load_filters(cfg);
  std::optional<ProminenceTable> prominence;
  if (cfg.has("prominence")) prominence = ProminenceTable::load_csv(cfg.require("prominence"));
  std::optional<NBModel> nb;
  if (cfg.flag("nb_prefilter", false))
    nb = nb_train_csv(cfg.require("nb_training"), cfg.num("nb_alpha", 1.0));

  auto home_zip = assign_home_zip(corpus.tweets);
  out.gender_report = assign_gender(corpus.profiles, corpus.names);
  out.urban = label_urban(home_zip, corpus.geo);

  std::unordered_map<std::string, std::vector<const TweetRecord*>> tweets_by_user;
  for (const auto& t : corpus.tweets) tweets_by_user[t.user_id].push_back(&t);

  FeatureInputs inputs;
  inputs.lexicon = &lexicon;
  inputs.categories = categories ? &*categories : nullptr;
  inputs.filters = &filters;
  inputs.census_by_county = &corpus.census;
  inputs.geo = &corpus.geo;
  inputs.prominence = prominence ? &*prominence : nullptr;
  inputs.nb_prefilter = nb ? &*nb : nullptr;
  inputs.exclude_replies_retweets = cfg.flag("drop_replies_retweets", false);

  std::vector<const UserProfile*> eligible;
  for (const auto& p : corpus.profiles) {
    if (exclude_none && p.gender == Gender::none) continue;
    eligible.push_back(&p);
  }
  std::vector<std::optional<UserFeatures>> slots(eligible.size());
  std::vector<int> skip_reason(eligible.size(), 0);  // 1 no zip, 2 no census
  static const std::vector<const TweetRecord*> kNoTweets;
  parallel_for(eligible.size(), cfg.workers(), [&](std::size_t i) {
    const UserProfile& p = *eligible[i];
    auto zip_it = home_zip.find(p.user_id);
    const std::string* zip = nullptr;
    if (zip_it != home_zip.end())
      zip = &zip_it->second;
    else if (p.home_zip)
      zip = &*p.home_zip;
    if (!zip) {
      skip_reason[i] = 1;
      return;
    }
    auto tw = tweets_by_user.find(p.user_id);
    const auto& tweets = tw == tweets_by_user.end() ? kNoTweets : tw->second;
    auto f = build_user_features(p, tweets, *zip, inputs);
    if (!f) {
      skip_reason[i] = 2;
      return;
    }
    slots[i] = std::move(f);
  });
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i])
      out.users.push_back(std::move(*slots[i]));
    else if (skip_reason[i] == 1)
      ++out.skipped_no_zip;
    else
      ++out.skipped_no_census;
  }
  out.area_means = prominence_area_means(out.users);
  for (const auto& u : out.users) {
    auto scores = interest_scores(u.prominence_scores, out.area_means);
    auto& areas = out.interest_areas[u.user_id];
    for (const auto& [area, on] : scores)
      if (on) areas.insert(area);
  }
  return out;
}

// ---------------------------------------------------------------------------
// user_features.csv round trip

std::string join_set(const std::set<std::string>& s) {
  std::string out;
  for (const auto& v : s) {
    if (!out.empty()) out += ';';
    out += v;
  }
  return out;
}

std::set<std::string> split_set(const std::string& s) {
  std::set<std::string> out;
  for (auto& part : split(s, ';'))
    if (!part.empty()) out.insert(part);
  return out;
}

void write_user_features_csv(const std::string& path, const FeatureBuild& build) {
  CsvWriter w({"user_id", "zip", "county", "state", "gender", "urban", "n_tweets", "n_retweets",
               "n_replies", "n_hashtags", "food_tweet_fraction", "avg_cal", "avg_cal_solid",
               "avg_cal_beverage", "avg_cal_alcoholic", "foods", "categories", "hashtags",
               "interests", "interest_areas", "prominence"});
  for (const auto& u : build.users) {
    auto urban_it = build.urban.find(u.user_id);
    std::string prominence;
    for (const auto& [area, score] : u.prominence_scores) {
      if (!prominence.empty()) prominence += ';';
      prominence += area + "=" + format_double(score);
    }
    std::string areas;
    auto ai = build.interest_areas.find(u.user_id);
    if (ai != build.interest_areas.end()) areas = join_set(ai->second);
    w.add_row({u.user_id, u.zip, u.county, u.state, to_string(u.gender),
               urban_it != build.urban.end() && urban_it->second == UrbanLabel::urban ? "urban"
                                                                                      : "rural",
               std::to_string(u.tweet_stats.n_tweets), std::to_string(u.tweet_stats.n_retweets),
               std::to_string(u.tweet_stats.n_replies), std::to_string(u.tweet_stats.n_hashtags),
               format_double(u.food_tweet_fraction), opt_str(u.avg_cal_by_class[0]),
               opt_str(u.avg_cal_by_class[1]), opt_str(u.avg_cal_by_class[2]),
               opt_str(u.avg_cal_by_class[3]), join_set(u.food_indicators),
               join_set(u.category_indicators), join_set(u.hashtag_indicators),
               join_set(u.interests), areas, prominence});
  }
  w.write_file(path);
}

struct UserFeatureRow {
  std::string user_id, zip, county, state, gender, urban;
  double food_tweet_fraction = 0.0;
  std::optional<double> avg_cal;
  std::set<std::string> foods, interests, areas;
};

std::vector<UserFeatureRow> load_user_features_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  std::size_t c_id = t.col("user_id"), c_zip = t.col("zip"), c_county = t.col("county"),
              c_state = t.col("state"), c_gender = t.col("gender"), c_urban = t.col("urban"),
              c_frac = t.col("food_tweet_fraction"), c_cal = t.col("avg_cal"),
              c_foods = t.col("foods"), c_interests = t.col("interests"),
              c_areas = t.col("interest_areas");
  std::vector<UserFeatureRow> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    UserFeatureRow r;
    r.user_id = row[c_id];
    r.zip = row[c_zip];
    r.county = row[c_county];
    r.state = row[c_state];
    r.gender = row[c_gender];
    r.urban = row[c_urban];
    r.food_tweet_fraction = std::stod(row[c_frac]);
    if (!row[c_cal].empty()) r.avg_cal = std::stod(row[c_cal]);
    r.foods = split_set(row[c_foods]);
    r.interests = split_set(row[c_interests]);
    r.areas = split_set(row[c_areas]);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// region aggregates csv round trip

void write_aggregates_csv(const std::string& path, const std::vector<RegionAggregate>& regions) {
  std::set<std::string> foods, cats, tags;
  for (const auto& r : regions) {
    for (const auto& [k, v] : r.food_weights) foods.insert(k);
    for (const auto& [k, v] : r.category_weights) cats.insert(k);
    for (const auto& [k, v] : r.hashtag_weights) tags.insert(k);
  }
  std::vector<std::string> header = {"region_id", "state", "n_users", "obesity_rate",
                                     "diabetes_rate", "avg_cal_all", "avg_cal_solid",
                                     "avg_cal_beverage", "avg_cal_alcoholic", "under_18",
                                     "over_65", "female", "afro_hispanic", "median_income",
                                     "bachelor_rate", "stat_n_tweets", "stat_n_retweets",
                                     "stat_n_replies", "stat_n_hashtags"};
  for (const auto& f : foods) header.push_back("food:" + f);
  for (const auto& c : cats) header.push_back("cat:" + c);
  for (const auto& t : tags) header.push_back("hashtag:" + t);
  CsvWriter w(header);
  for (const auto& r : regions) {
    std::vector<std::string> row = {r.region_id, r.state, std::to_string(r.n_users),
                                    format_double(r.outcome.obesity_rate),
                                    format_double(r.outcome.diabetes_rate),
                                    opt_str(r.mean_avg_cal[0]), opt_str(r.mean_avg_cal[1]),
                                    opt_str(r.mean_avg_cal[2]), opt_str(r.mean_avg_cal[3])};
    if (r.demographics) {
      const auto& d = *r.demographics;
      for (double v : {d.under_18, d.over_65, d.female, d.afro_hispanic, d.median_income,
                       d.bachelor_rate})
        row.push_back(format_double(v));
    } else {
      for (int i = 0; i < 6; ++i) row.emplace_back();
    }
    for (double v : r.stat_means) row.push_back(format_double(v));
    auto emit_weight = [&row](const std::map<std::string, double>& m, const std::string& key) {
      auto it = m.find(key);
      row.push_back(it == m.end() ? "0" : format_double(it->second));
    };
    for (const auto& f : foods) emit_weight(r.food_weights, f);
    for (const auto& c : cats) emit_weight(r.category_weights, c);
    for (const auto& t : tags) emit_weight(r.hashtag_weights, t);
    w.add_row(std::move(row));
  }
  w.write_file(path);
}

std::vector<RegionAggregate> load_aggregates_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  std::vector<RegionAggregate> out;
  std::size_t c_id = t.col("region_id"), c_state = t.col("state"), c_n = t.col("n_users");
  std::size_t c_ob = t.col("obesity_rate"), c_di = t.col("diabetes_rate");
  std::array<std::size_t, 4> c_cal = {t.col("avg_cal_all"), t.col("avg_cal_solid"),
                                      t.col("avg_cal_beverage"), t.col("avg_cal_alcoholic")};
  std::array<std::size_t, 6> c_demog = {t.col("under_18"), t.col("over_65"), t.col("female"),
                                        t.col("afro_hispanic"), t.col("median_income"),
                                        t.col("bachelor_rate")};
  std::array<std::size_t, 4> c_stat = {t.col("stat_n_tweets"), t.col("stat_n_retweets"),
                                       t.col("stat_n_replies"), t.col("stat_n_hashtags")};
  for (const auto& row : t.rows) {
    RegionAggregate r;
    r.region_id = row[c_id];
    r.state = row[c_state];
    r.n_users = static_cast<std::size_t>(std::stoull(row[c_n]));
    r.outcome = {r.region_id, std::stod(row[c_ob]), std::stod(row[c_di])};
    for (std::size_t k = 0; k < 4; ++k)
      if (!row[c_cal[k]].empty()) r.mean_avg_cal[k] = std::stod(row[c_cal[k]]);
    if (!row[c_demog[0]].empty()) {
      CensusRecord d;
      d.region_id = r.region_id;
      d.under_18 = std::stod(row[c_demog[0]]);
      d.over_65 = std::stod(row[c_demog[1]]);
      d.female = std::stod(row[c_demog[2]]);
      d.afro_hispanic = std::stod(row[c_demog[3]]);
      d.median_income = std::stod(row[c_demog[4]]);
      d.bachelor_rate = std::stod(row[c_demog[5]]);
      r.demographics = d;
    }
    for (std::size_t k = 0; k < 4; ++k) r.stat_means[k] = std::stod(row[c_stat[k]]);
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      const std::string& h = t.header[j];
      if (h.starts_with("food:"))
        r.food_weights[h.substr(5)] = std::stod(row[j]);
      else if (h.starts_with("cat:"))
        r.category_weights[h.substr(4)] = std::stod(row[j]);
      else if (h.starts_with("hashtag:"))
        r.hashtag_weights[h.substr(8)] = std::stod(row[j]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// subcommand bodies

int cmd_synth(const Config& cfg) {
  SynthConfig sc;
  sc.seed = cfg.seed();
  sc.outdir = cfg.outdir();
  sc.lexicon_path = cfg.require("lexicon");
  sc.n_states = static_cast<int>(cfg.integer("n_states", sc.n_states));
  sc.counties_per_state = static_cast<int>(cfg.integer("counties_per_state", sc.counties_per_state));
  sc.users_per_county = static_cast<int>(cfg.integer("users_per_county", sc.users_per_county));
  sc.tweets_per_user_min = static_cast<int>(cfg.integer("tweets_per_user_min", sc.tweets_per_user_min));
  sc.tweets_per_user_max = static_cast<int>(cfg.integer("tweets_per_user_max", sc.tweets_per_user_max));
  sc.outcome_intercept = cfg.num("outcome_intercept", sc.outcome_intercept);
  sc.diabetes_intercept = cfg.num("diabetes_intercept", sc.diabetes_intercept);
  sc.food_signal_sd = cfg.num("food_signal_sd", sc.food_signal_sd);
  sc.demog_signal_sd = cfg.num("demog_signal_sd", sc.demog_signal_sd);
  sc.noise_sigma = cfg.num("noise_sigma", sc.noise_sigma);
  sc.state_noise_sigma = cfg.num("state_noise_sigma", sc.state_noise_sigma);
  sc.beta_jitter = cfg.num("beta_jitter", sc.beta_jitter);
  sc.diabetes_food_scale = cfg.num("diabetes_food_scale", sc.diabetes_food_scale);
  sc.homophily = cfg.num("homophily", sc.homophily);
  sc.mean_degree = cfg.num("mean_degree", sc.mean_degree);
  sc.urban_fraction = cfg.num("urban_fraction", sc.urban_fraction);
  sc.gender_none_fraction = cfg.num("gender_none_fraction", sc.gender_none_fraction);
  sc.n_areas = static_cast<int>(cfg.integer("n_areas", sc.n_areas));
  sc.accounts_per_area = static_cast<int>(cfg.integer("accounts_per_area", sc.accounts_per_area));
  SynthTruth truth = generate(sc);

  // ready-to-run config for the downstream stages
  const std::string& d = sc.outdir;
  std::string conf;
  conf += "# generated by foodsig synth\n";
  conf += "seed = " + std::to_string(sc.seed) + "\n";
  conf += "outdir = " + d + "\n";
  for (const char* name : {"tweets.jsonl", "profiles.jsonl"})
    conf += std::string(name).substr(0, std::string(name).find('.')) + " = " + d + "/" + name + "\n";
  for (const char* name : {"census.csv", "health.csv", "zip_county.csv", "county_state.csv",
                           "metro_zips.csv", "name_gender.csv", "lexicon.csv", "prominence.csv",
                           "nb_training.csv"})
    conf += std::string(name).substr(0, std::string(name).find('.')) + " = " + d + "/" + name + "\n";
  conf += "user_features = " + d + "/user_features.csv\n";
  conf += "county_aggregates = " + d + "/county_aggregates.csv\n";
  conf += "state_aggregates = " + d + "/state_aggregates.csv\n";
  conf += "user_scores = " + d + "/user_scores.csv\n";
  // gender-none users are excluded from user-level analyses, so the county
  // retention threshold is the per-county count of gender-known users
  long known = sc.users_per_county -
               std::llround(sc.gender_none_fraction * static_cast<double>(sc.users_per_county));
  conf += "min_users = " + std::to_string(std::max(1L, known)) + "\n";
  write_text_file(d + "/pipeline.conf", conf);

  json summary;
  summary["n_users"] = truth.n_users;
  summary["friendship_edges"] = truth.friendship_edges;
  summary["mention_edges"] = truth.mention_edges;
  summary["r2_obesity"] = truth.r2_obesity;
  summary["r2_diabetes"] = truth.r2_diabetes;
  summary["urban_fraction_realized"] = truth.urban_fraction_realized;
  write_text_file(d + "/synth_summary.json", summary.dump(2) + "\n");
  write_manifest(cfg, "synth");
  return 0;
}

int cmd_ingest(const Config& cfg) {
  unsigned bits = 0;
  if (cfg.has("tweets")) bits |= kTweets;
  if (cfg.has("profiles")) bits |= kProfiles;
  if (cfg.has("census")) bits |= kCensus;
  if (cfg.has("health")) bits |= kHealth;
  if (cfg.has("zip_county")) bits |= kGeo;
  if (cfg.has("name_gender")) bits |= kNames;
  if (bits == 0) throw ConfigError("ingest: no input files configured");
  Corpus corpus = load_corpus(cfg, bits);
  corpus.report["tweet_count"] = corpus.tweets.size();
  corpus.report["profile_count"] = corpus.profiles.size();
  write_text_file(cfg.outdir() + "/ingest_report.json", corpus.report.dump(2) + "\n");
  write_manifest(cfg, "ingest");
  return 0;
}

int cmd_match(const Config& cfg) {
  Corpus corpus = load_corpus(cfg, kTweets);
  FoodLexicon lexicon = FoodLexicon::load_csv(cfg.require("lexicon"));
  ClassFilter class_filter = class_filter_from_string(cfg.get("class_filter", "all"));
  std::optional<NBModel> nb;
  if (cfg.flag("nb_prefilter", false))
    nb = nb_train_csv(cfg.require("nb_training"), cfg.num("nb_alpha", 1.0));

  struct Row {
    std::string surfaces;
    std::size_t n = 0;
    std::optional<double> avg;
    bool skipped = false;
  };
  std::vector<Row> rows(corpus.tweets.size());
  parallel_for(corpus.tweets.size(), cfg.workers(), [&](std::size_t i) {
    const TweetRecord& t = corpus.tweets[i];
    std::vector<std::string> tokens = tokenize(t.text);
    if (nb && nb_classify(*nb, tokens).label != NBLabel::food) {
      rows[i].skipped = true;
      return;
    }
    MatchResult m = match_tokens(tokens, lexicon);
    rows[i].n = m.matches.size();
    rows[i].avg = tweet_avg_calories(m, class_filter);
    for (const auto& match : m.matches) {
      if (!rows[i].surfaces.empty()) rows[i].surfaces += ';';
      rows[i].surfaces += match.entry->surface;
    }
  });
  CsvWriter w({"tweet_id", "user_id", "n_matches", "avg_cal", "surfaces"});
  std::size_t matched = 0, skipped = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.n > 0) ++matched;
    if (r.skipped) ++skipped;
    w.add_row({corpus.tweets[i].tweet_id, corpus.tweets[i].user_id, std::to_string(r.n),
               opt_str(r.avg), r.surfaces});
  }
  w.write_file(cfg.outdir() + "/matches.csv");
  json summary;
  summary["tweets"] = rows.size();
  summary["tweets_with_matches"] = matched;
  summary["tweets_skipped_by_prefilter"] = skipped;
  write_text_file(cfg.outdir() + "/match_summary.json", summary.dump(2) + "\n");
  write_manifest(cfg, "match");
  return 0;
}

int cmd_features(const Config& cfg) {
  Corpus corpus = load_corpus(cfg, kTweets | kProfiles | kCensus | kHealth | kGeo | kNames);
  FeatureBuild build =
      build_all_features(corpus, cfg, cfg.flag("exclude_none_gender", true));

  write_user_features_csv(cfg.require("user_features"), build);

  auto vocab = top_hashtags(build.users, static_cast<std::size_t>(cfg.integer("max_hashtags", 1000)));
  std::size_t dropped_county = 0, dropped_state = 0;
  auto county_aggs = aggregate_region(build.users, RegionLevel::county,
                                      static_cast<std::size_t>(cfg.integer("min_users", 100)),
                                      corpus.census, corpus.outcomes, vocab, &dropped_county);
  auto state_aggs = aggregate_region(build.users, RegionLevel::state,
                                     static_cast<std::size_t>(cfg.integer("min_users_state", 1)),
                                     corpus.census, corpus.outcomes, vocab, &dropped_state);
  write_aggregates_csv(cfg.require("county_aggregates"), county_aggs);
  write_aggregates_csv(cfg.require("state_aggregates"), state_aggs);

  json summary;
  summary["users_built"] = build.users.size();
  summary["skipped_no_zip"] = build.skipped_no_zip;
  summary["skipped_no_census"] = build.skipped_no_census;
  summary["gender"] = {{"female", build.gender_report.female},
                       {"male", build.gender_report.male},
                       {"none", build.gender_report.none},
                       {"coverage", build.gender_report.coverage()}};
  summary["counties"] = county_aggs.size();
  summary["states"] = state_aggs.size();
  summary["counties_dropped_no_outcome"] = dropped_county;
  summary["states_dropped_no_outcome"] = dropped_state;
  write_text_file(cfg.outdir() + "/features_summary.json", summary.dump(2) + "\n");
  write_manifest(cfg, "features");
  return 0;
}

int cmd_correlate(const Config& cfg) {
  Corpus corpus = load_corpus(cfg, kTweets | kProfiles | kCensus | kHealth | kGeo | kNames);
  // gender-none users stay in the state correlations by default
  FeatureBuild build =
      build_all_features(corpus, cfg, cfg.flag("correlate_exclude_none", false));
  auto state_aggs = aggregate_region(build.users, RegionLevel::state,
                                     static_cast<std::size_t>(cfg.integer("min_users_state", 1)),
                                     corpus.census, corpus.outcomes);
  CsvWriter w({"class", "target", "n", "pearson", "p_pearson", "spearman", "p_spearman"});
  for (std::size_t c = 0; c < kClassFilterCount; ++c) {
    std::vector<double> x;
    std::vector<double> y_ob, y_di;
    for (const auto& agg : state_aggs) {
      if (!agg.mean_avg_cal[c]) continue;
      x.push_back(*agg.mean_avg_cal[c]);
      y_ob.push_back(agg.outcome.obesity_rate);
      y_di.push_back(agg.outcome.diabetes_rate);
    }
    for (int target = 0; target < 2; ++target) {
      const auto& y = target == 0 ? y_ob : y_di;
      std::string target_name = target == 0 ? "obesity" : "diabetes";
      std::string cls = to_string(static_cast<ClassFilter>(c));
      if (x.size() < 3) {
        w.add_row({cls, target_name, std::to_string(x.size()), "", "", "", ""});
        continue;
      }
      Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
      Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
      CorrelationResult r = correlate(xv, yv);
      w.add_row({cls, target_name, std::to_string(r.n), format_double(r.r),
                 format_double(r.p_r), format_double(r.rho), format_double(r.p_rho)});
    }
  }
  w.write_file(cfg.outdir() + "/state_correlations.csv");
  write_manifest(cfg, "correlate");
  return 0;
}

int cmd_fit(const Config& cfg) {
  auto regions = load_aggregates_csv(cfg.require("county_aggregates"));
  CrossValidateOptions options;
  options.k = static_cast<int>(cfg.integer("k", 5));
  options.lambda = cfg.num("lambda", 1.0);
  options.seed = cfg.seed();
  options.lambda_grid = cfg.numbers("lambda_grid", {});
  CsvWriter w({"model", "target", "mean_r", "sem_r", "lambda", "fold_r"});
  for (Target target : {Target::obesity, Target::diabetes}) {
    std::size_t dropped = 0;
    DesignMatrix X = build_design_matrix(regions, target, &dropped);
    for (const auto& spec : standard_model_specs()) {
      EvalResult res = cross_validate(spec, X, options);
      std::string folds;
      for (double r : res.fold_r) {
        if (!folds.empty()) folds += ';';
        folds += format_double(r);
      }
      w.add_row({res.model_name, res.target_name, format_double(res.mean_r),
                 format_double(res.sem_r), format_double(res.lambda), folds});
      RidgeModel full = ridge_fit(X.select_columns(spec.column_prefixes), options.lambda);
      write_text_file(cfg.outdir() + "/models/" + res.model_name + "_" + res.target_name + ".json",
                      full.to_json());
    }
  }
  w.write_file(cfg.outdir() + "/fit_results.csv");
  write_manifest(cfg, "fit");
  return 0;
}

int cmd_score(const Config& cfg) {
  auto users = load_user_features_csv(cfg.require("user_features"));
  IngestReport hr;
  std::unordered_map<std::string, HealthOutcome> outcomes;
  for (auto& rec : ingest_health(cfg.require("health"), hr)) outcomes.emplace(rec.region_id, rec);

  // user-level training set per the risk-score design: binary food vectors,
  // target = home-county rate, demographics deliberately excluded
  std::vector<UserFeatures> feats;
  feats.reserve(users.size());
  for (const auto& r : users) {
    UserFeatures f;
    f.user_id = r.user_id;
    f.county = r.county;
    f.state = r.state;
    f.food_indicators = r.foods;
    feats.push_back(std::move(f));
  }
  std::set<std::string> vocab_set;
  for (const auto& f : feats)
    for (const auto& s : f.food_indicators) vocab_set.insert(s);
  std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
  double lambda = cfg.num("lambda", 1.0);

  std::vector<std::vector<UserScore>> scores(2);
  bool flagged = false;
  for (int t = 0; t < 2; ++t) {
    Target target = t == 0 ? Target::obesity : Target::diabetes;
    std::size_t dropped = 0;
    DesignMatrix X = build_user_design_matrix(feats, vocab, target, outcomes, &dropped);
    if (X.rows() < 2) throw DataError("score: not enough users with county outcomes");
    RidgeModel model = ridge_fit(X, lambda);
    write_text_file(cfg.outdir() + "/models/user_food_" + to_string(target) + ".json",
                    model.to_json());
    std::vector<std::pair<std::string, const std::set<std::string>*>> rows;
    rows.reserve(feats.size());
    for (const auto& f : feats) rows.emplace_back(f.user_id, &f.food_indicators);
    scores[static_cast<std::size_t>(t)] = score_users(model, rows);
  }
  CsvWriter w({"user_id", "obesity_score", "diabetes_score", "intercept_only"});
  for (std::size_t i = 0; i < scores[0].size(); ++i) {
    flagged = flagged || scores[0][i].no_model_columns;
    w.add_row({scores[0][i].user_id, format_double(scores[0][i].score),
               format_double(scores[1][i].score), scores[0][i].no_model_columns ? "1" : "0"});
  }
  w.write_file(cfg.require("user_scores"));
  write_manifest(cfg, "score");
  return 0;
}

int cmd_interests(const Config& cfg) {
  auto users = load_user_features_csv(cfg.require("user_features"));
  CsvTable scores_csv = read_csv(cfg.require("user_scores"));
  std::size_t c_id = scores_csv.col("user_id");
  std::size_t c_score = scores_csv.col(to_string(target_from_string(cfg.get("target", "obesity"))) +
                                       "_score");
  std::unordered_map<std::string, double> score;
  for (const auto& row : scores_csv.rows) score[row[c_id]] = std::stod(row[c_score]);

  // only gender-known users enter the interest analysis
  std::vector<const UserFeatureRow*> keep;
  for (const auto& u : users)
    if (u.gender != "none" && score.contains(u.user_id)) keep.push_back(&u);

  Eigen::VectorXd values(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i)
    values[static_cast<Eigen::Index>(i)] = score.at(keep[i]->user_id);

  std::set<std::string> factors, areas;
  for (const auto* u : keep) {
    for (const auto& f : u->interests) factors.insert(f);
    for (const auto& a : u->areas) areas.insert(a);
  }
  CsvWriter w({"factor", "diff", "p", "n_nonzero"});
  auto emit_factor = [&](const std::string& name, auto member) {
    std::vector<bool> flags;
    flags.reserve(keep.size());
    std::size_t n_nonzero = 0;
    for (const auto* u : keep) {
      bool on = member(*u, name);
      flags.push_back(on);
      if (on) ++n_nonzero;
    }
    try {
      FactorDifference d = factor_difference(values, flags);
      w.add_row({name, format_double(d.diff), format_double(d.p), std::to_string(n_nonzero)});
    } catch (const DataError&) {
      w.add_row({name, "", "", std::to_string(n_nonzero)});
    }
  };
  for (const auto& f : factors)
    emit_factor(f, [](const UserFeatureRow& u, const std::string& n) { return u.interests.contains(n); });
  w.write_file(cfg.outdir() + "/interest_differences.csv");

  // prominence-area regression (coefficients sorted by magnitude)
  CsvWriter wr({"factor", "coefficient", "n_nonzero"});
  if (!areas.empty() && keep.size() >= 2) {
    DesignMatrix X;
    X.target_name = "score";
    std::vector<std::string> area_list(areas.begin(), areas.end());
    for (const auto& a : area_list) X.column_names.push_back("area:" + a);
    X.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(keep.size()),
                                     static_cast<Eigen::Index>(area_list.size()));
    X.target = values;
    std::vector<std::size_t> nonzero(area_list.size(), 0);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      X.row_ids.push_back(keep[i]->user_id);
      X.groups.push_back(keep[i]->state);
      for (std::size_t j = 0; j < area_list.size(); ++j)
        if (keep[i]->areas.contains(area_list[j])) {
          X.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
          ++nonzero[j];
        }
    }
    RidgeModel model = ridge_fit(X, cfg.num("lambda", 1.0));
    std::vector<std::size_t> order(area_list.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      double ca = std::fabs(model.coefficients[static_cast<Eigen::Index>(a)]);
      double cb = std::fabs(model.coefficients[static_cast<Eigen::Index>(b)]);
      if (ca != cb) return ca > cb;
      return area_list[a] < area_list[b];
    });
    wr.add_row({"(intercept)", format_double(model.intercept), ""});
    for (std::size_t j : order)
      wr.add_row({area_list[j], format_double(model.coefficients[static_cast<Eigen::Index>(j)]),
                  std::to_string(nonzero[j])});
  }
  wr.write_file(cfg.outdir() + "/interest_regression.csv");
  write_manifest(cfg, "interests");
  return 0;
}

int cmd_distinguish(const Config& cfg) {
  Corpus corpus = load_corpus(cfg, kTweets | kGeo);
  FoodLexicon lexicon = FoodLexicon::load_csv(cfg.require("lexicon"));
  std::map<std::string, TermCounts> state_counts;
  TermCounts global_counts;
  std::vector<MatchResult> matches(corpus.tweets.size());
  parallel_for(corpus.tweets.size(), cfg.workers(), [&](std::size_t i) {
    matches[i] = match_foods(corpus.tweets[i].text, lexicon);
  });
  for (std::size_t i = 0; i < corpus.tweets.size(); ++i) {
    const auto& t = corpus.tweets[i];
    if (!t.zip) continue;
    auto state = corpus.geo.state_of_zip(*t.zip);
    if (!state) continue;
    for (const auto& m : matches[i].matches) {
      state_counts[*state][m.entry->surface]++;
      global_counts[m.entry->surface]++;
    }
  }
  int top_k = static_cast<int>(cfg.integer("top_k", 200));
  int emit = static_cast<int>(cfg.integer("distinguish_top", 10));
  CsvWriter w({"state", "rank", "term", "score"});
  for (const auto& [state, counts] : state_counts) {
    auto scored = distinguishing_terms(counts, global_counts, top_k);
    for (std::size_t i = 0; i < scored.size() && i < static_cast<std::size_t>(emit); ++i)
      w.add_row({state, std::to_string(i + 1), scored[i].term, format_double(scored[i].score)});
  }
  w.write_file(cfg.outdir() + "/distinguishing_foods.csv");
  write_manifest(cfg, "distinguish");
  return 0;
}

struct NetworkInputs {
  Corpus corpus;
  std::vector<UserFeatureRow> features;
  std::unordered_map<std::string, double> obesity_score, diabetes_score;
  std::unordered_map<std::string, std::string> user_state;
  std::unordered_map<std::string, double> food_fraction;
};

NetworkInputs load_network_inputs(const Config& cfg, bool need_scores) {
  NetworkInputs in;
  in.corpus = load_corpus(cfg, kTweets | kProfiles | kNames);
  assign_gender(in.corpus.profiles, in.corpus.names);
  in.features = load_user_features_csv(cfg.require("user_features"));
  for (const auto& r : in.features) {
    in.user_state.emplace(r.user_id, r.state);
    in.food_fraction.emplace(r.user_id, r.food_tweet_fraction);
  }
  if (need_scores) {
    CsvTable t = read_csv(cfg.require("user_scores"));
    std::size_t c_id = t.col("user_id"), c_ob = t.col("obesity_score"),
                c_di = t.col("diabetes_score");
    for (const auto& row : t.rows) {
      in.obesity_score.emplace(row[c_id], std::stod(row[c_ob]));
      in.diabetes_score.emplace(row[c_id], std::stod(row[c_di]));
    }
  }
  // graphs cover exactly the users the analysis has data for
  std::unordered_set<std::string> with_rows;
  for (const auto& r : in.features) with_rows.insert(r.user_id);
  std::erase_if(in.corpus.profiles, [&](const UserProfile& p) {
    if (!with_rows.contains(p.user_id)) return true;
    if (need_scores && !in.obesity_score.contains(p.user_id)) return true;
    return false;
  });
  return in;
}

std::vector<GraphKind> requested_kinds(const Config& cfg) {
  std::string which = cfg.get("network", "both");
  if (which == "friendship") return {GraphKind::friendship};
  if (which == "mention") return {GraphKind::mention};
  if (which == "both") return {GraphKind::friendship, GraphKind::mention};
  throw ConfigError("network must be friendship, mention, or both");
}

int cmd_network_activation(const Config& cfg) {
  NetworkInputs in = load_network_inputs(cfg, true);
  Target target = target_from_string(cfg.get("target", "obesity"));
  const auto& scores = target == Target::obesity ? in.obesity_score : in.diabetes_score;
  ActivationOptions options;
  options.percentile = cfg.num("percentile", 90.0);
  options.drop_same_state = cfg.flag("drop_same_state", false);
  options.drop_replies_retweets = cfg.flag("drop_replies_retweets", false);
  options.user_state = &in.user_state;
  json summary;
  for (GraphKind kind : requested_kinds(cfg)) {
    SocialGraph g =
        cfg.has("graph_edges")
            ? load_graph_csv(cfg.require("graph_edges"), cfg.get("graph_friends", ""), kind)
        : kind == GraphKind::friendship
            ? build_friendship(in.corpus.profiles)
            : build_mention(in.corpus.tweets, in.corpus.profiles, options.drop_replies_retweets);
    ActivationCurve curve = activation_analysis(g, scores, options);
    std::string name = kind == GraphKind::friendship ? "friendship" : "mention";
    CsvWriter w({"x", "n", "n_active", "p", "se"});
    for (const auto& pt : curve.points)
      w.add_row({std::to_string(pt.x), std::to_string(pt.n), std::to_string(pt.n_active),
                 pt.n == 0 ? "" : format_double(pt.p), pt.n == 0 ? "" : format_double(pt.se)});
    w.write_file(cfg.outdir() + "/activation_" + name + ".csv");
    summary[name] = {{"nodes", g.node_count()},
                     {"links", g.edge_count()},
                     {"threshold", curve.threshold},
                     {"active", curve.n_active_total}};
  }
  write_text_file(cfg.outdir() + "/activation_summary.json", summary.dump(2) + "\n");
  write_manifest(cfg, "network activation");
  return 0;
}

int cmd_network_cliqueness(const Config& cfg) {
  NetworkInputs in = load_network_inputs(cfg, false);
  CliquenessOptions options;
  options.bin_edges = cfg.numbers("bins", options.bin_edges);
  options.bootstrap_iters = static_cast<int>(cfg.integer("bootstrap_iters", 1000));
  options.seed = cfg.seed();
  options.workers = cfg.workers();
  json summary;
  for (GraphKind kind : requested_kinds(cfg)) {
    SocialGraph g =
        cfg.has("graph_edges")
            ? load_graph_csv(cfg.require("graph_edges"), cfg.get("graph_friends", ""), kind)
        : kind == GraphKind::friendship
            ? build_friendship(in.corpus.profiles)
            : build_mention(in.corpus.tweets, in.corpus.profiles,
                            cfg.flag("drop_replies_retweets", false));
    JaccardBinReport report = cliqueness_analysis(g, in.food_fraction, options);
    std::string name = kind == GraphKind::friendship ? "friendship" : "mention";
    CsvWriter w({"bin_lo", "bin_hi", "n_links", "defined", "r", "ci_lo", "ci_hi", "redraws"});
    for (const auto& b : report.bins)
      w.add_row({format_double(b.lo), format_double(b.hi), std::to_string(b.n_links),
                 b.defined ? "1" : "0", b.defined ? format_double(b.r) : "",
                 b.defined ? format_double(b.ci.lo) : "", b.defined ? format_double(b.ci.hi) : "",
                 std::to_string(b.ci.redraws)});
    w.write_file(cfg.outdir() + "/cliqueness_" + name + ".csv");
    summary[name] = {{"links", report.total_links}, {"nodes", g.node_count()}};
  }
  write_text_file(cfg.outdir() + "/cliqueness_summary.json", summary.dump(2) + "\n");
  write_manifest(cfg, "network cliqueness");
  return 0;
}

// ---------------------------------------------------------------------------

void emit_error(std::string_view type, std::string_view message) {
  json j;
  j["error"] = {{"type", std::string(type)}, {"message", std::string(message)}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"dietary-health signals from geo-tagged microblog corpora"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::string> outdir_flag;
  std::optional<int> workers_flag;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value pipeline config file");
    sub->add_option("--set", sets, "override a config key (key=value, repeatable)");
    sub->add_option("--seed", seed_flag, "random seed (mandatory, overrides config)");
    sub->add_option("--outdir", outdir_flag, "output directory (overrides config)");
    sub->add_option("--workers", workers_flag, "worker threads (never changes results)");
  };

  auto* synth_cmd = app.add_subcommand("synth", "generate a seeded synthetic nation");
  auto* ingest_cmd = app.add_subcommand("ingest", "validate and report on input files");
  auto* match_cmd = app.add_subcommand("match", "run food matching over tweets");
  auto* features_cmd = app.add_subcommand("features", "build user features and region aggregates");
  auto* correlate_cmd = app.add_subcommand("correlate", "state-level caloric correlations");
  auto* fit_cmd = app.add_subcommand("fit", "cross-validated county models");
  auto* score_cmd = app.add_subcommand("score", "user-level risk scores from food vectors");
  auto* interests_cmd = app.add_subcommand("interests", "interest factor differences");
  auto* distinguish_cmd = app.add_subcommand("distinguish", "per-state distinguishing foods");
  auto* network_cmd = app.add_subcommand("network", "social-network analyses");
  network_cmd->require_subcommand(1);
  auto* activation_cmd = network_cmd->add_subcommand("activation", "threshold activation curves");
  auto* cliqueness_cmd = network_cmd->add_subcommand("cliqueness", "jaccard tie-strength bins");
  for (CLI::App* sub : {synth_cmd, ingest_cmd, match_cmd, features_cmd, correlate_cmd, fit_cmd,
                        score_cmd, interests_cmd, distinguish_cmd, activation_cmd, cliqueness_cmd})
    add_common(sub);

  std::vector<const char*> argv;
  argv.push_back("foodsig");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::ostringstream oss;
    oss << e.get_name() << ": " << e.what();
    emit_error("config", oss.str());
    return 2;
  }

  try {
    Config cfg;
    if (!config_path.empty()) load_config_file(cfg, config_path);
    apply_overrides(cfg, sets);
    if (seed_flag) cfg.kv["seed"] = std::to_string(*seed_flag);
    if (outdir_flag) cfg.kv["outdir"] = *outdir_flag;
    if (workers_flag) cfg.kv["workers"] = std::to_string(*workers_flag);
    cfg.seed();     // mandatory for every subcommand
    cfg.outdir();   // likewise

    if (synth_cmd->parsed()) return cmd_synth(cfg);
    if (ingest_cmd->parsed()) return cmd_ingest(cfg);
    if (match_cmd->parsed()) return cmd_match(cfg);
    if (features_cmd->parsed()) return cmd_features(cfg);
    if (correlate_cmd->parsed()) return cmd_correlate(cfg);
    if (fit_cmd->parsed()) return cmd_fit(cfg);
    if (score_cmd->parsed()) return cmd_score(cfg);
    if (interests_cmd->parsed()) return cmd_interests(cfg);
    if (distinguish_cmd->parsed()) return cmd_distinguish(cfg);
    if (network_cmd->parsed()) {
      if (activation_cmd->parsed()) return cmd_network_activation(cfg);
      if (cliqueness_cmd->parsed()) return cmd_network_cliqueness(cfg);
    }
    throw ConfigError("no subcommand selected");
  } catch (const ConfigError& e) {
    emit_error("config", e.what());
    return 2;
  } catch (const DataError& e) {
    emit_error("data", e.what());
    return 3;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 4;
  }
}

}  // namespace foodsig
