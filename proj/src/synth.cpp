#include "foodsig/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

#include <json.hpp>

#include "foodsig/csv.hpp"
#include "foodsig/error.hpp"
#include "foodsig/lexicon.hpp"
#include "foodsig/rng.hpp"

namespace foodsig {

using nlohmann::json;

namespace {

const std::array<const char*, 20> kFemaleNames = {
    "alice", "emma",  "olivia", "sophia", "mia",    "ava",  "lily",   "grace", "chloe", "ella",
    "nora",  "ruby",  "hazel",  "ivy",    "luna",   "maya", "zoe",    "stella", "violet", "clara"};
const std::array<const char*, 20> kMaleNames = {
    "liam", "noah", "oliver", "james", "henry", "lucas", "mason", "ethan", "logan", "jack",
    "owen", "leo",  "miles",  "eli",   "finn",  "ryan",  "luke",  "adam",  "evan",  "cole"};

const std::array<const char*, 24> kFillerWords = {
    "going",  "work",    "today",  "tomorrow", "really", "great",  "about", "again",
    "never",  "always",  "maybe",  "weather",  "game",   "movie",  "song",  "traffic",
    "meeting", "morning", "evening", "weekend", "monday", "friday", "home",  "later"};

const std::array<const char*, 12> kHashtagPool = {
    "mondaymood", "weekendvibes", "nofilter", "blessed",   "grind",   "sunset",
    "citylife",   "roadtrip",     "gameday",  "throwback", "goals",   "vibes"};

const std::array<const char*, 12> kAreaPool = {"tv",     "music",  "sports", "news",
                                               "tech",   "movies", "fitness", "travel",
                                               "books",  "science", "art",    "cars"};

// Food tweet templates; {} is replaced by the surface. All non-placeholder
// words must stay out of the lexicon (checked at generation time).
const std::array<const char*, 5> kFoodTemplates = {
    "just had {} for lunch", "craving {} right now", "made {} at home today",
    "best {} in town", "{} again because why not"};

const std::array<const char*, 8> kProfileBaseWords = {
    "enjoying", "every", "day",     "welcome", "official", "account", "views", "mine"};

struct UserPlan {
  std::size_t index = 0;
  std::string id;
  std::size_t county_index = 0;
  std::string county, state, zip, other_zip;
  bool urban = false;
  Gender gender = Gender::none;
  std::string name;  // capitalized first name; empty for gender none
  std::string screen_name;
  std::vector<std::size_t> foods;  // lexicon entry indices
  double risk = 0.0;
  std::vector<std::size_t> mutual;
  std::vector<std::size_t> one_way;
  std::vector<std::string> extra_follows;  // celebrity + prominent accounts
  std::vector<std::size_t> mention_out;
  bool fatproblems = false;
  std::string profile_text;
};

std::string pad(std::size_t value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

double sample_sd_of(const std::vector<double>& v) {
  double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Words colliding with any lexicon token would create stray food matches.
template <class Pool>
std::vector<std::string> safe_pool(const Pool& pool,
                                   const std::unordered_set<std::string>& lexicon_tokens) {
  std::vector<std::string> out;
  for (const char* w : pool)
    if (!lexicon_tokens.contains(w)) out.emplace_back(w);
  if (out.empty()) throw DataError("synth: word pool fully collides with the lexicon");
  return out;
}

void finalize_graph(SocialGraph& g) {
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  g.adjacency.assign(g.node_count(), {});
  for (const auto& [a, b] : g.edges) {
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
  }
  for (auto& nbrs : g.adjacency) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (n_states < 1 || n_states > 99) throw ConfigError("synth: n_states must be in [1,99]");
  if (counties_per_state < 1 || counties_per_state > 999)
    throw ConfigError("synth: counties_per_state must be in [1,999]");
  if (n_states * counties_per_state < 3)
    throw ConfigError("synth: need at least 3 counties (correlations undefined downstream)");
  if (users_per_county < 1) throw ConfigError("synth: users_per_county must be > 0");
  if (tweets_per_user_min < 1 || tweets_per_user_max < tweets_per_user_min)
    throw ConfigError("synth: bad tweets_per_user range");
  if (lexicon_path.empty()) throw ConfigError("synth: lexicon_path required");
  if (outdir.empty()) throw ConfigError("synth: outdir required");
  if (noise_sigma < 0.0 || state_noise_sigma < 0.0) throw ConfigError("synth: sigma must be >= 0");
  if (homophily < 0.0 || homophily > 1.0) throw ConfigError("synth: homophily must be in [0,1]");
  if (urban_fraction < 0.0 || urban_fraction > 1.0)
    throw ConfigError("synth: urban_fraction must be in [0,1]");
  if (gender_none_fraction < 0.0 || gender_none_fraction >= 1.0)
    throw ConfigError("synth: gender_none_fraction must be in [0,1)");
  if (food_signal_sd < 0.0 || demog_signal_sd < 0.0)
    throw ConfigError("synth: signal sds must be >= 0");
  if (n_areas < 1 || n_areas > static_cast<int>(kAreaPool.size()))
    throw ConfigError("synth: n_areas out of range");
  if (accounts_per_area < 1 || accounts_per_area > 200)
    throw ConfigError("synth: accounts_per_area must be in [1,200]");
  if (mean_degree < 0.0) throw ConfigError("synth: mean_degree must be >= 0");
}

SynthTruth generate(const SynthConfig& config) {
  config.validate();
  FoodLexicon lexicon = FoodLexicon::load_csv(config.lexicon_path);
  const auto& foods = lexicon.entries();
  const std::size_t n_foods = foods.size();
  if (n_foods < 2) throw DataError("synth: lexicon needs at least 2 entries");

  std::unordered_set<std::string> lexicon_tokens;
  for (const auto& e : foods)
    for (const auto& t : e.tokens) lexicon_tokens.insert(t);
  const auto filler = safe_pool(kFillerWords, lexicon_tokens);
  const auto profile_base = safe_pool(kProfileBaseWords, lexicon_tokens);
  for (const char* tpl : kFoodTemplates)
    for (const auto& w : tokenize(tpl))
      if (w != "{}" && lexicon_tokens.contains(w))
        throw DataError("synth: template word '" + w + "' collides with the lexicon");

  const std::size_t n_counties =
      static_cast<std::size_t>(config.n_states) * static_cast<std::size_t>(config.counties_per_state);
  const std::size_t users_per_county = static_cast<std::size_t>(config.users_per_county);
  const std::size_t n_users = n_counties * users_per_county;
  const std::uint64_t seed = config.seed;

  SynthTruth truth;
  truth.seed = seed;
  truth.n_users = n_users;

  // ---- geography -------------------------------------------------------
  std::vector<std::string> states, counties, county_state;
  std::vector<std::string> county_urban_zip, county_rural_zip;
  for (int s = 0; s < config.n_states; ++s) states.push_back(pad(static_cast<std::size_t>(s + 1), 2));
  for (std::size_t c = 0; c < n_counties; ++c) {
    std::size_t s = c / static_cast<std::size_t>(config.counties_per_state);
    counties.push_back(states[s] + pad(c % static_cast<std::size_t>(config.counties_per_state) + 1, 3));
    county_state.push_back(states[s]);
    std::size_t zip_base = 10000 + 2 * c;
    if (zip_base + 1 > 99999) throw ConfigError("synth: too many counties for the zip space");
    county_urban_zip.push_back(pad(zip_base, 5));
    county_rural_zip.push_back(pad(zip_base + 1, 5));
  }

  // ---- calorie gradient and raw food coefficients -----------------------
  std::vector<double> cal(n_foods), zcal(n_foods);
  for (std::size_t f = 0; f < n_foods; ++f) cal[f] = foods[f].calories;
  double cal_mean = mean_of(cal), cal_sd = sample_sd_of(cal);
  if (cal_sd <= 0.0) throw DataError("synth: lexicon calories are constant");
  for (std::size_t f = 0; f < n_foods; ++f) zcal[f] = (cal[f] - cal_mean) / cal_sd;

  // Second food direction, orthogonalized against the calorie gradient: the
  // part of the planted signal a single avgCal variable cannot explain but
  // the full food-weight vector can.
  std::vector<double> dir2(n_foods);
  {
    Rng rng(derive_seed(seed, stream_label("dir2")));
    for (std::size_t f = 0; f < n_foods; ++f) dir2[f] = rng.normal();
    double dot = 0.0, zz = 0.0;
    for (std::size_t f = 0; f < n_foods; ++f) {
      dot += dir2[f] * zcal[f];
      zz += zcal[f] * zcal[f];
    }
    for (std::size_t f = 0; f < n_foods; ++f) dir2[f] -= dot / zz * zcal[f];
    double ss = 0.0;
    for (double v : dir2) ss += v * v;
    double norm = std::sqrt(ss / static_cast<double>(n_foods));
    if (norm > 1e-12)
      for (double& v : dir2) v /= norm;
  }

  std::vector<double> beta_raw(n_foods), base_popularity(n_foods);
  {
    Rng rng(derive_seed(seed, stream_label("beta")));
    for (std::size_t f = 0; f < n_foods; ++f)
      beta_raw[f] = zcal[f] + dir2[f] + config.beta_jitter * rng.normal();
    Rng rng_base(derive_seed(seed, stream_label("base")));
    for (std::size_t f = 0; f < n_foods; ++f) base_popularity[f] = rng_base.uniform(0.08, 0.40);
  }

  // ---- county food weights (weights-first, exact k/U proportions) -------
  const double slope = 0.13;   // calorie-gradient county factor
  const double slope2 = 0.07;  // orthogonal food-direction county factor
  std::vector<std::vector<int>> county_food_count(n_counties, std::vector<int>(n_foods, 0));
  std::vector<double> county_diet(n_counties), county_diet2(n_counties);
  std::vector<CensusRecord> census(n_counties);
  for (std::size_t c = 0; c < n_counties; ++c) {
    Rng rng(derive_seed(seed, stream_label("county"), c));
    county_diet[c] = rng.normal();
    county_diet2[c] = rng.normal();
    CensusRecord& d = census[c];
    d.region_id = counties[c];
    d.under_18 = rng.uniform(0.18, 0.30);
    d.over_65 = rng.uniform(0.08, 0.22);
    d.female = rng.uniform(0.47, 0.53);
    d.afro_hispanic = rng.uniform(0.03, 0.45);
    d.median_income = std::clamp(std::exp(rng.normal(std::log(55000.0), 0.25)), 25000.0, 150000.0);
    d.bachelor_rate = rng.uniform(0.12, 0.45);
    for (std::size_t f = 0; f < n_foods; ++f) {
      double p = std::clamp(base_popularity[f] + slope * zcal[f] * county_diet[c] +
                                slope2 * dir2[f] * county_diet2[c],
                            0.02, 0.95);
      county_food_count[c][f] = rng.binomial(static_cast<int>(users_per_county), p);
    }
  }

  // ---- rescale betas so the food component has the requested sd ---------
  std::vector<double> raw_signal(n_counties, 0.0);
  for (std::size_t c = 0; c < n_counties; ++c)
    for (std::size_t f = 0; f < n_foods; ++f)
      raw_signal[c] += beta_raw[f] * static_cast<double>(county_food_count[c][f]) /
                       static_cast<double>(users_per_county);
  double raw_mean = mean_of(raw_signal);
  double raw_sd = n_counties > 1 ? sample_sd_of(raw_signal) : 0.0;
  double beta_scale = 0.0;
  if (config.food_signal_sd > 0.0) {
    if (raw_sd <= 1e-12) throw DataError("synth: no between-county food variation");
    beta_scale = config.food_signal_sd / raw_sd;
  }
  std::vector<double> beta(n_foods);
  for (std::size_t f = 0; f < n_foods; ++f) {
    beta[f] = beta_raw[f] * beta_scale;
    truth.beta[foods[f].surface] = beta[f];
  }
  truth.beta_intercept = config.outcome_intercept - beta_scale * raw_mean;
  truth.diabetes_beta_scale = config.diabetes_food_scale;
  truth.diabetes_demog_scale = 0.6;
  truth.diabetes_beta_intercept =
      config.diabetes_intercept - config.diabetes_food_scale * beta_scale * raw_mean;

  // ---- demographic component (z-scored county features, fixed pattern) --
  std::vector<double> demog_signal(n_counties, 0.0);
  if (config.demog_signal_sd > 0.0 && n_counties > 1) {
    const std::array<double, 5> gamma = {0.6, 0.4, -0.2, 0.9, -1.0};
    std::array<std::vector<double>, 5> cols;
    for (std::size_t c = 0; c < n_counties; ++c) {
      cols[0].push_back(census[c].under_18);
      cols[1].push_back(census[c].over_65);
      cols[2].push_back(census[c].female);
      cols[3].push_back(census[c].afro_hispanic);
      cols[4].push_back(std::log(census[c].median_income));
    }
    for (std::size_t k = 0; k < 5; ++k) {
      double m = mean_of(cols[k]), sd = sample_sd_of(cols[k]);
      if (sd <= 0.0) continue;
      for (std::size_t c = 0; c < n_counties; ++c)
        demog_signal[c] += gamma[k] * (cols[k][c] - m) / sd;
    }
    double dm = mean_of(demog_signal), dsd = sample_sd_of(demog_signal);
    if (dsd > 1e-12)
      for (auto& v : demog_signal) v = (v - dm) * (config.demog_signal_sd / dsd);
    else
      std::fill(demog_signal.begin(), demog_signal.end(), 0.0);
  }

  // ---- county outcomes ---------------------------------------------------
  std::vector<HealthOutcome> outcomes(n_counties);
  truth.counties.resize(n_counties);
  {
    for (std::size_t c = 0; c < n_counties; ++c) {
      Rng rng(derive_seed(seed, stream_label("noise"), c));
      SynthCountyTruth& ct = truth.counties[c];
      ct.county = counties[c];
      ct.state = county_state[c];
      ct.food_signal = beta_scale * (raw_signal[c] - raw_mean);
      ct.demog_signal = demog_signal[c];
      ct.noise = rng.normal(0.0, config.noise_sigma);
      ct.diabetes_noise = rng.normal(0.0, 0.5 * config.noise_sigma);
      ct.obesity = config.outcome_intercept + ct.food_signal + ct.demog_signal + ct.noise;
      ct.diabetes = config.diabetes_intercept + config.diabetes_food_scale * ct.food_signal +
                    truth.diabetes_demog_scale * ct.demog_signal + ct.diabetes_noise;
      if (ct.obesity < 0.5 || ct.obesity > 99.5 || ct.diabetes < 0.5 || ct.diabetes > 99.5)
        throw DataError("synth: planted outcome outside [0,100]; soften the signal config");
      for (std::size_t f = 0; f < n_foods; ++f)
        if (county_food_count[c][f] > 0)
          ct.food_weights[foods[f].surface] = static_cast<double>(county_food_count[c][f]) /
                                              static_cast<double>(users_per_county);
      outcomes[c] = {counties[c], ct.obesity, ct.diabetes};
    }
    std::vector<double> planted(n_counties), obs(n_counties), dia_p(n_counties), dia(n_counties);
    for (std::size_t c = 0; c < n_counties; ++c) {
      planted[c] = truth.counties[c].food_signal + truth.counties[c].demog_signal;
      obs[c] = truth.counties[c].obesity;
      dia_p[c] = config.diabetes_food_scale * truth.counties[c].food_signal +
                 truth.diabetes_demog_scale * truth.counties[c].demog_signal;
      dia[c] = truth.counties[c].diabetes;
    }
    if (n_counties > 1 && sample_sd_of(obs) > 0.0) {
      double vs = sample_sd_of(planted), vo = sample_sd_of(obs);
      truth.r2_obesity = (vs * vs) / (vo * vo);
      double ds = sample_sd_of(dia_p), dv = sample_sd_of(dia);
      truth.r2_diabetes = dv > 0.0 ? (ds * ds) / (dv * dv) : 0.0;
    }
  }

  // ---- users -------------------------------------------------------------
  std::vector<UserPlan> users(n_users);
  std::size_t urban_total = 0;
  for (std::size_t c = 0; c < n_counties; ++c) {
    Rng rng(derive_seed(seed, stream_label("users"), c));
    std::size_t n_none = static_cast<std::size_t>(
        std::llround(config.gender_none_fraction * static_cast<double>(users_per_county)));
    std::size_t n_named = users_per_county - n_none;
    std::size_t n_female = (n_named + 1) / 2;
    std::vector<int> kind(users_per_county, 2);  // 0 female, 1 male, 2 none
    for (std::size_t i = 0; i < n_female; ++i) kind[i] = 0;
    for (std::size_t i = n_female; i < n_named; ++i) kind[i] = 1;
    rng.shuffle(kind);

    std::size_t k_urban = static_cast<std::size_t>(
        std::llround(config.urban_fraction * static_cast<double>(users_per_county)));
    std::vector<char> urban(users_per_county, 0);
    for (std::size_t i = 0; i < k_urban; ++i) urban[i] = 1;
    rng.shuffle(urban);

    for (std::size_t i = 0; i < users_per_county; ++i) {
      UserPlan& u = users[c * users_per_county + i];
      u.index = c * users_per_county + i;
      u.id = "u" + pad(u.index + 1, 6);
      u.county_index = c;
      u.county = counties[c];
      u.state = county_state[c];
      u.urban = urban[i] != 0;
      u.zip = u.urban ? county_urban_zip[c] : county_rural_zip[c];
      u.other_zip = u.urban ? county_rural_zip[c] : county_urban_zip[c];
      if (urban[i]) ++urban_total;
      if (kind[i] == 0) {
        u.gender = Gender::female;
        u.name = kFemaleNames[(c + i) % kFemaleNames.size()];
      } else if (kind[i] == 1) {
        u.gender = Gender::male;
        u.name = kMaleNames[(c + i) % kMaleNames.size()];
      }
      u.screen_name = u.gender == Gender::none ? "zq" + pad(u.index + 1, 6) + "x"
                                               : u.name + "_" + pad(u.index + 1, 6);
      truth.modal_zip[u.id] = u.zip;
      truth.user_urban[u.id] = u.urban;
      switch (u.gender) {
        case Gender::female: ++truth.n_female; break;
        case Gender::male: ++truth.n_male; break;
        case Gender::none: ++truth.n_none; break;
      }
    }

    // assign exactly k users per food, so aggregates equal planted weights
    std::vector<std::size_t> order(users_per_county);
    for (std::size_t f = 0; f < n_foods; ++f) {
      int k = county_food_count[c][f];
      if (k == 0) continue;
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng frng(derive_seed(seed, stream_label("assign"), c, f));
      frng.shuffle(order);
      for (int j = 0; j < k; ++j)
        users[c * users_per_county + order[static_cast<std::size_t>(j)]].foods.push_back(f);
    }
  }
  truth.urban_fraction_realized = static_cast<double>(urban_total) / static_cast<double>(n_users);
  for (auto& u : users) {
    std::sort(u.foods.begin(), u.foods.end());
    for (std::size_t f : u.foods) u.risk += beta[f];
    truth.user_risk[u.id] = u.risk;
  }

  // ---- friendship graph (homophily over risk ranks) ----------------------
  std::vector<std::size_t> by_rank(n_users);
  std::iota(by_rank.begin(), by_rank.end(), std::size_t{0});
  std::sort(by_rank.begin(), by_rank.end(), [&](std::size_t a, std::size_t b) {
    if (users[a].risk != users[b].risk) return users[a].risk < users[b].risk;
    return a < b;
  });
  std::vector<std::size_t> rank_of(n_users);
  for (std::size_t r = 0; r < n_users; ++r) rank_of[by_rank[r]] = r;

  std::set<std::pair<std::size_t, std::size_t>> mutual_edges;
  if (n_users > 1 && config.mean_degree > 0.0) {
    Rng rng(derive_seed(seed, stream_label("graph")));
    std::size_t target = static_cast<std::size_t>(
        std::llround(config.mean_degree * static_cast<double>(n_users) / 2.0));
    std::size_t window = std::max<std::size_t>(3, n_users / 16);
    std::size_t attempts = 0, limit = 60 * target + 1000;
    while (mutual_edges.size() < target && attempts < limit) {
      ++attempts;
      std::size_t a = rng.below(n_users);
      std::size_t b;
      if (rng.chance(config.homophily)) {
        std::int64_t lo = static_cast<std::int64_t>(rank_of[a]) - static_cast<std::int64_t>(window);
        std::int64_t hi = static_cast<std::int64_t>(rank_of[a]) + static_cast<std::int64_t>(window);
        lo = std::max<std::int64_t>(lo, 0);
        hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(n_users) - 1);
        b = by_rank[static_cast<std::size_t>(lo + static_cast<std::int64_t>(rng.below(
                        static_cast<std::uint64_t>(hi - lo + 1))))];
      } else {
        b = rng.below(n_users);
      }
      if (a == b) continue;
      mutual_edges.emplace(std::min(a, b), std::max(a, b));
    }
  }
  for (const auto& [a, b] : mutual_edges) {
    users[a].mutual.push_back(b);
    users[b].mutual.push_back(a);
    if (users[a].gender != Gender::none && users[b].gender != Gender::none)
      ++truth.friendship_edges;
  }

  // one-way follows: never reciprocated, so they add no friendship edges
  {
    std::set<std::pair<std::size_t, std::size_t>> one_way_dir;
    Rng rng(derive_seed(seed, stream_label("oneway")));
    for (std::size_t i = 0; i < n_users; ++i) {
      for (int k = 0; k < 2 && n_users > 3; ++k) {
        for (int tries = 0; tries < 20; ++tries) {
          std::size_t t = rng.below(n_users);
          if (t == i) continue;
          if (mutual_edges.contains({std::min(i, t), std::max(i, t)})) continue;
          if (one_way_dir.contains({t, i})) continue;  // would reciprocate
          if (!one_way_dir.emplace(i, t).second) continue;
          users[i].one_way.push_back(t);
          break;
        }
      }
    }
  }

  // ---- mention edges ------------------------------------------------------
  std::set<std::pair<std::size_t, std::size_t>> mention_edges;
  {
    Rng rng(derive_seed(seed, stream_label("mention")));
    for (const auto& [a, b] : mutual_edges) {
      if (!rng.chance(0.5)) continue;
      if (rng.chance(0.5))
        mention_edges.emplace(a, b);
      else
        mention_edges.emplace(b, a);
    }
    std::size_t extra = mutual_edges.size() / 3;
    for (std::size_t k = 0; k < extra && n_users > 1; ++k) {
      std::size_t a = rng.below(n_users), b = rng.below(n_users);
      if (a != b) mention_edges.emplace(a, b);
    }
  }
  for (const auto& [a, b] : mention_edges) {
    users[a].mention_out.push_back(b);
    if (users[a].gender != Gender::none && users[b].gender != Gender::none)
      ++truth.mention_edges;
  }

  // ---- prominence table and follows --------------------------------------
  std::vector<std::string> areas(kAreaPool.begin(), kAreaPool.begin() + config.n_areas);
  std::vector<std::vector<std::pair<std::string, double>>> prominent(areas.size());
  {
    Rng rng(derive_seed(seed, stream_label("prominence")));
    for (std::size_t a = 0; a < areas.size(); ++a)
      for (int k = 0; k < config.accounts_per_area; ++k)
        prominent[a].emplace_back("prom_" + areas[a] + "_" + pad(static_cast<std::size_t>(k + 1), 3),
                                  std::round(rng.uniform(20.0, 100.0) * 10.0) / 10.0);
  }
  {
    Rng rng(derive_seed(seed, stream_label("follows")));
    for (auto& u : users) {
      double rnorm = static_cast<double>(rank_of[u.index]) / static_cast<double>(n_users);
      for (std::size_t a = 0; a < areas.size(); ++a) {
        double tilt = areas[a] == "tv" ? 0.30 : areas[a] == "tech" ? -0.30 : 0.0;
        double p = 0.18 + tilt * (rnorm - 0.5);
        if (!rng.chance(p)) continue;
        int k = rng.uniform_int(1, 3);
        for (int j = 0; j < k; ++j)
          u.extra_follows.push_back(
              prominent[a][static_cast<std::size_t>(rng.below(prominent[a].size()))].first);
      }
      // county celebrity pool: same-county users share follows, which gives
      // same-county links higher Jaccard strength
      int n_celeb = rng.uniform_int(5, 12);
      for (int j = 0; j < n_celeb; ++j)
        u.extra_follows.push_back("celeb_" + u.county + "_" +
                                  pad(static_cast<std::size_t>(rng.uniform_int(1, 30)), 2));
    }
  }

  // ---- profiles -----------------------------------------------------------
  {
    std::vector<double> county_median(n_counties);
    for (std::size_t c = 0; c < n_counties; ++c) {
      std::vector<double> risks;
      for (std::size_t i = 0; i < users_per_county; ++i)
        risks.push_back(users[c * users_per_county + i].risk);
      std::sort(risks.begin(), risks.end());
      county_median[c] = risks[risks.size() / 2];
    }
    Rng rng(derive_seed(seed, stream_label("profiles")));
    for (auto& u : users) {
      std::string text = profile_base[rng.below(profile_base.size())];
      text += " " + profile_base[rng.below(profile_base.size())];
      bool low_risk = u.risk < county_median[u.county_index];
      if (rng.chance(low_risk ? 0.10 : 0.03)) text += rng.chance(0.5) ? " chef" : " cooking";
      if (rng.chance(0.12)) text += u.gender == Gender::female ? " proud mom" : " proud dad";
      if (rng.chance(0.05)) text += " student";
      if (rng.chance(0.02)) text += " organic";
      if (rng.chance(0.015)) text += " on a diet";
      if (rng.chance(0.06)) text += " fitness";
      if (rng.chance(0.15)) text += " friends";
      if (rng.chance(0.15)) text += " working";
      u.profile_text = text;
      u.fatproblems = rng.chance(0.04);
    }
  }

  // ---- tweets -------------------------------------------------------------
  std::filesystem::create_directories(config.outdir);
  auto out_path = [&](const char* name) { return config.outdir + "/" + std::string(name); };

  std::string tweets_out;
  tweets_out.reserve(n_users * 200);
  for (auto& u : users) {
    Rng rng(derive_seed(seed, stream_label("tweets"), u.index));
    struct PlannedTweet {
      std::string text;
      bool is_reply = false, is_retweet = false;
      std::string zip;
    };
    std::vector<PlannedTweet> planned;
    for (std::size_t f : u.foods) {
      std::string tpl = kFoodTemplates[rng.below(kFoodTemplates.size())];
      std::size_t pos = tpl.find("{}");
      PlannedTweet t;
      t.text = tpl.substr(0, pos) + foods[f].surface + tpl.substr(pos + 2);
      planned.push_back(std::move(t));
    }
    for (std::size_t target : u.mention_out) {
      PlannedTweet t;
      t.text = "@" + users[target].id + " " + filler[rng.below(filler.size())] + " " +
               filler[rng.below(filler.size())];
      t.is_reply = rng.chance(0.3);
      planned.push_back(std::move(t));
    }
    std::size_t n_target = static_cast<std::size_t>(
        rng.uniform_int(config.tweets_per_user_min, config.tweets_per_user_max));
    // at least two filler tweets on top of the planned food/mention ones
    n_target = std::max(n_target, planned.size() + 2);
    while (planned.size() < n_target) {
      PlannedTweet t;
      t.text = filler[rng.below(filler.size())] + " " + filler[rng.below(filler.size())] + " " +
               filler[rng.below(filler.size())];
      t.is_retweet = rng.chance(0.08);
      if (rng.chance(0.2)) t.text += " #" + std::string(kHashtagPool[rng.below(kHashtagPool.size())]);
      planned.push_back(std::move(t));
    }
    if (u.fatproblems)
      planned.back().text +=
          u.gender == Gender::female ? " #fatgirlproblems" : " #fatguyproblems";
    rng.shuffle(planned);
    for (auto& t : planned) t.zip = u.zip;
    if (planned.size() >= 3) planned.back().zip = u.other_zip;  // keeps the mode at home

    for (std::size_t k = 0; k < planned.size(); ++k) {
      const auto& t = planned[k];
      json j;
      j["tweet_id"] = "t" + pad(u.index + 1, 6) + "_" + pad(k + 1, 3);
      j["user_id"] = u.id;
      j["timestamp"] = 1700000000 + static_cast<std::int64_t>(u.index) * 100000 +
                       static_cast<std::int64_t>(k) * 60;
      j["text"] = t.text;
      j["zip"] = t.zip;
      j["is_reply"] = t.is_reply;
      j["is_retweet"] = t.is_retweet;
      j["hashtags"] = extract_hashtags(t.text);
      j["mentions"] = extract_mentions(t.text);
      tweets_out += j.dump();
      tweets_out += '\n';
    }
  }
  write_text_file(out_path("tweets.jsonl"), tweets_out);

  // ---- profiles file ------------------------------------------------------
  std::string profiles_out;
  profiles_out.reserve(n_users * 160);
  for (const auto& u : users) {
    json j;
    j["user_id"] = u.id;
    j["screen_name"] = u.screen_name;
    if (!u.name.empty()) j["first_name"] = capitalize(u.name);
    j["profile_text"] = u.profile_text;
    std::vector<std::string> friends, followers;
    for (std::size_t m : u.mutual) {
      friends.push_back(users[m].id);
      followers.push_back(users[m].id);
    }
    for (std::size_t t : u.one_way) friends.push_back(users[t].id);
    for (const auto& x : u.extra_follows) friends.push_back(x);
    std::sort(friends.begin(), friends.end());
    friends.erase(std::unique(friends.begin(), friends.end()), friends.end());
    std::sort(followers.begin(), followers.end());
    j["friend_ids"] = friends;
    j["follower_ids"] = followers;
    profiles_out += j.dump();
    profiles_out += '\n';
  }
  write_text_file(out_path("profiles.jsonl"), profiles_out);

  // ---- csv side files -----------------------------------------------------
  {
    CsvWriter w({"region_id", "under_18", "over_65", "female", "afro_hispanic", "median_income",
                 "bachelor_rate"});
    for (const auto& d : census)
      w.add_row({d.region_id, format_double(d.under_18), format_double(d.over_65),
                 format_double(d.female), format_double(d.afro_hispanic),
                 format_double(d.median_income), format_double(d.bachelor_rate)});
    w.write_file(out_path("census.csv"));
  }
  {
    CsvWriter w({"region_id", "obesity_rate", "diabetes_rate"});
    for (const auto& h : outcomes)
      w.add_row({h.region_id, format_double(h.obesity_rate), format_double(h.diabetes_rate)});
    // state rows: user-weighted mean over counties plus a little noise
    Rng rng(derive_seed(seed, stream_label("state_noise")));
    for (int s = 0; s < config.n_states; ++s) {
      double ob = 0.0, di = 0.0;
      for (int c = 0; c < config.counties_per_state; ++c) {
        const auto& ct = truth.counties[static_cast<std::size_t>(s) *
                                            static_cast<std::size_t>(config.counties_per_state) +
                                        static_cast<std::size_t>(c)];
        ob += ct.obesity;
        di += ct.diabetes;
      }
      ob /= config.counties_per_state;
      di /= config.counties_per_state;
      ob += rng.normal(0.0, config.state_noise_sigma);
      di += rng.normal(0.0, config.state_noise_sigma);
      w.add_row({states[static_cast<std::size_t>(s)], format_double(std::clamp(ob, 0.5, 99.5)),
                 format_double(std::clamp(di, 0.5, 99.5))});
    }
    w.write_file(out_path("health.csv"));
  }
  {
    CsvWriter w({"zip", "county"});
    for (std::size_t c = 0; c < n_counties; ++c) {
      w.add_row({county_urban_zip[c], counties[c]});
      w.add_row({county_rural_zip[c], counties[c]});
    }
    w.write_file(out_path("zip_county.csv"));
  }
  {
    CsvWriter w({"county", "state"});
    for (std::size_t c = 0; c < n_counties; ++c) w.add_row({counties[c], county_state[c]});
    w.write_file(out_path("county_state.csv"));
  }
  {
    CsvWriter w({"zip"});
    for (std::size_t c = 0; c < n_counties; ++c) w.add_row({county_urban_zip[c]});
    w.write_file(out_path("metro_zips.csv"));
  }
  {
    CsvWriter w({"name", "gender"});
    for (const char* n : kFemaleNames) w.add_row({n, "female"});
    for (const char* n : kMaleNames) w.add_row({n, "male"});
    w.write_file(out_path("name_gender.csv"));
  }
  {
    CsvWriter w({"account_id", "area", "score"});
    for (std::size_t a = 0; a < areas.size(); ++a)
      for (const auto& [acc, score] : prominent[a])
        w.add_row({acc, areas[a], format_double(score)});
    w.write_file(out_path("prominence.csv"));
  }
  {
    // small labeled set for the optional NB pre-filter stage
    CsvWriter w({"text", "label"});
    Rng rng(derive_seed(seed, stream_label("nb")));
    for (int i = 0; i < 40; ++i) {
      std::string tpl = kFoodTemplates[rng.below(kFoodTemplates.size())];
      std::size_t pos = tpl.find("{}");
      const auto& f = foods[rng.below(n_foods)];
      w.add_row({tpl.substr(0, pos) + f.surface + tpl.substr(pos + 2), "food"});
    }
    for (int i = 0; i < 80; ++i)
      w.add_row({filler[rng.below(filler.size())] + " " + filler[rng.below(filler.size())] + " " +
                     filler[rng.below(filler.size())],
                 "not_food"});
    w.write_file(out_path("nb_training.csv"));
  }
  write_text_file(out_path("lexicon.csv"), read_text_file(config.lexicon_path));
  write_text_file(out_path("truth.json"), truth.to_json());
  return truth;
}

std::string SynthTruth::to_json() const {
  json j;
  j["seed"] = seed;
  j["n_users"] = n_users;
  j["n_female"] = n_female;
  j["n_male"] = n_male;
  j["n_none"] = n_none;
  j["urban_fraction_realized"] = urban_fraction_realized;
  j["friendship_edges"] = friendship_edges;
  j["mention_edges"] = mention_edges;
  j["r2_obesity"] = r2_obesity;
  j["r2_diabetes"] = r2_diabetes;
  j["beta_intercept"] = beta_intercept;
  j["diabetes_beta_scale"] = diabetes_beta_scale;
  j["diabetes_demog_scale"] = diabetes_demog_scale;
  j["diabetes_beta_intercept"] = diabetes_beta_intercept;
  j["beta"] = json(std::map<std::string, double>(beta.begin(), beta.end()));
  j["modal_zip"] = json(std::map<std::string, std::string>(modal_zip.begin(), modal_zip.end()));
  j["user_risk"] = json(std::map<std::string, double>(user_risk.begin(), user_risk.end()));
  j["user_urban"] = json(std::map<std::string, bool>(user_urban.begin(), user_urban.end()));
  json cs = json::array();
  for (const auto& c : counties) {
    json cj;
    cj["county"] = c.county;
    cj["state"] = c.state;
    cj["obesity"] = c.obesity;
    cj["diabetes"] = c.diabetes;
    cj["food_signal"] = c.food_signal;
    cj["demog_signal"] = c.demog_signal;
    cj["noise"] = c.noise;
    cj["diabetes_noise"] = c.diabetes_noise;
    cj["food_weights"] = json(c.food_weights);
    cs.push_back(std::move(cj));
  }
  j["counties"] = std::move(cs);
  return j.dump(1) + "\n";
}

SynthTruth SynthTruth::from_json(const std::string& text) {
  json j = json::parse(text);
  SynthTruth t;
  t.seed = j.at("seed").get<std::uint64_t>();
  t.n_users = j.at("n_users").get<std::size_t>();
  t.n_female = j.at("n_female").get<std::size_t>();
  t.n_male = j.at("n_male").get<std::size_t>();
  t.n_none = j.at("n_none").get<std::size_t>();
  t.urban_fraction_realized = j.at("urban_fraction_realized").get<double>();
  t.friendship_edges = j.at("friendship_edges").get<std::size_t>();
  t.mention_edges = j.at("mention_edges").get<std::size_t>();
  t.r2_obesity = j.at("r2_obesity").get<double>();
  t.r2_diabetes = j.at("r2_diabetes").get<double>();
  t.beta_intercept = j.at("beta_intercept").get<double>();
  t.diabetes_beta_scale = j.at("diabetes_beta_scale").get<double>();
  t.diabetes_demog_scale = j.at("diabetes_demog_scale").get<double>();
  t.diabetes_beta_intercept = j.at("diabetes_beta_intercept").get<double>();
  for (const auto& [k, v] : j.at("beta").items()) t.beta[k] = v.get<double>();
  for (const auto& [k, v] : j.at("modal_zip").items()) t.modal_zip[k] = v.get<std::string>();
  for (const auto& [k, v] : j.at("user_risk").items()) t.user_risk[k] = v.get<double>();
  for (const auto& [k, v] : j.at("user_urban").items()) t.user_urban[k] = v.get<bool>();
  for (const auto& cj : j.at("counties")) {
    SynthCountyTruth c;
    c.county = cj.at("county").get<std::string>();
    c.state = cj.at("state").get<std::string>();
    c.obesity = cj.at("obesity").get<double>();
    c.diabetes = cj.at("diabetes").get<double>();
    c.food_signal = cj.at("food_signal").get<double>();
    c.demog_signal = cj.at("demog_signal").get<double>();
    c.noise = cj.at("noise").get<double>();
    c.diabetes_noise = cj.at("diabetes_noise").get<double>();
    for (const auto& [k, v] : cj.at("food_weights").items()) c.food_weights[k] = v.get<double>();
    t.counties.push_back(std::move(c));
  }
  return t;
}

PlantedActivationGraph generate_homophily_graph(std::size_t n_nodes, double homophily,
                                                double mean_degree, std::uint64_t seed,
                                                int n_states) {
  if (n_nodes < 2) throw ConfigError("homophily graph: need at least 2 nodes");
  if (homophily < 0.0 || homophily > 1.0) throw ConfigError("homophily must be in [0,1]");
  PlantedActivationGraph out;
  out.graph.kind = GraphKind::friendship;
  std::vector<double> risk(n_nodes);
  Rng rng(derive_seed(seed, stream_label("planted_activation")));
  for (std::size_t i = 0; i < n_nodes; ++i) {
    out.graph.node_ids.push_back("n" + pad(i + 1, 7));
    risk[i] = rng.normal();
  }
  for (std::size_t i = 0; i < n_nodes; ++i) {
    out.graph.node_index.emplace(out.graph.node_ids[i], i);
    out.scores.emplace(out.graph.node_ids[i], risk[i]);
    out.user_state.emplace(out.graph.node_ids[i],
                           "S" + pad(i % static_cast<std::size_t>(n_states) + 1, 2));
  }
  std::vector<std::size_t> by_rank(n_nodes);
  std::iota(by_rank.begin(), by_rank.end(), std::size_t{0});
  std::sort(by_rank.begin(), by_rank.end(),
            [&](std::size_t a, std::size_t b) { return risk[a] < risk[b]; });
  std::vector<std::size_t> rank_of(n_nodes);
  for (std::size_t r = 0; r < n_nodes; ++r) rank_of[by_rank[r]] = r;

  std::set<std::pair<std::size_t, std::size_t>> edges;
  std::size_t target =
      static_cast<std::size_t>(std::llround(mean_degree * static_cast<double>(n_nodes) / 2.0));
  std::size_t window = std::max<std::size_t>(3, n_nodes / 16);
  std::size_t attempts = 0, limit = 60 * target + 1000;
  while (edges.size() < target && attempts < limit) {
    ++attempts;
    std::size_t a = rng.below(n_nodes);
    std::size_t b;
    if (rng.chance(homophily)) {
      std::int64_t lo = static_cast<std::int64_t>(rank_of[a]) - static_cast<std::int64_t>(window);
      std::int64_t hi = static_cast<std::int64_t>(rank_of[a]) + static_cast<std::int64_t>(window);
      lo = std::max<std::int64_t>(lo, 0);
      hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(n_nodes) - 1);
      b = by_rank[static_cast<std::size_t>(
          lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))))];
    } else {
      b = rng.below(n_nodes);
    }
    if (a == b) continue;
    edges.emplace(std::min(a, b), std::max(a, b));
  }
  out.graph.edges.assign(edges.begin(), edges.end());
  out.graph.friend_sets.assign(n_nodes, {});
  finalize_graph(out.graph);
  return out;
}

PlantedCliquenessGraph generate_overlap_gradient_graph(std::size_t links_per_bin,
                                                       std::uint64_t seed,
                                                       std::vector<double> planted_bin_r,
                                                       std::vector<double> bin_edges) {
  if (bin_edges.size() < 2 || planted_bin_r.size() != bin_edges.size() - 1)
    throw ConfigError("overlap graph: need one planted r per bin");
  if (links_per_bin < 3) throw ConfigError("overlap graph: need at least 3 links per bin");
  for (double r : planted_bin_r)
    if (r < 0.0 || r >= 1.0) throw ConfigError("overlap graph: planted r must be in [0,1)");

  PlantedCliquenessGraph out;
  out.bin_edges = bin_edges;
  out.planted_bin_r = planted_bin_r;
  out.graph.kind = GraphKind::friendship;
  const std::size_t n_bins = planted_bin_r.size();
  const std::size_t n_nodes = 2 * n_bins * links_per_bin;
  const int set_size = 40;

  Rng rng(derive_seed(seed, stream_label("planted_cliqueness")));
  out.graph.friend_sets.assign(n_nodes, {});
  std::uint32_t next_friend_id = 1;
  std::size_t node = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    double lo = bin_edges[b], hi = bin_edges[b + 1];
    double target_j = 0.5 * (lo + hi);
    int shared = static_cast<int>(std::lround(2.0 * set_size * target_j / (1.0 + target_j)));
    // nudge until the realized Jaccard falls inside the half-open bin
    auto realized = [&](int m) {
      return static_cast<double>(m) / static_cast<double>(2 * set_size - m);
    };
    for (int tries = 0; tries < 5; ++tries) {
      double jj = realized(shared);
      bool inside = b + 1 == n_bins ? (jj >= lo && jj <= hi) : (jj >= lo && jj < hi);
      if (inside) break;
      shared += jj < lo ? 1 : -1;
    }
    shared = std::clamp(shared, 0, set_size);
    double rho = planted_bin_r[b];
    for (std::size_t l = 0; l < links_per_bin; ++l) {
      std::size_t u = node++, v = node++;
      auto& su = out.graph.friend_sets[u];
      auto& sv = out.graph.friend_sets[v];
      for (int k = 0; k < shared; ++k) {
        su.push_back(next_friend_id);
        sv.push_back(next_friend_id);
        ++next_friend_id;
      }
      for (int k = shared; k < set_size; ++k) su.push_back(next_friend_id++);
      for (int k = shared; k < set_size; ++k) sv.push_back(next_friend_id++);
      out.graph.edges.emplace_back(u, v);
      double g = rng.normal();
      double fu = 0.5 + 0.12 * (std::sqrt(rho) * g + std::sqrt(1.0 - rho) * rng.normal());
      double fv = 0.5 + 0.12 * (std::sqrt(rho) * g + std::sqrt(1.0 - rho) * rng.normal());
      out.fractions["c" + pad(u + 1, 7)] = std::clamp(fu, 0.0, 1.0);
      out.fractions["c" + pad(v + 1, 7)] = std::clamp(fv, 0.0, 1.0);
    }
  }
  for (std::size_t i = 0; i < n_nodes; ++i) out.graph.node_ids.push_back("c" + pad(i + 1, 7));
  for (std::size_t i = 0; i < n_nodes; ++i) out.graph.node_index.emplace(out.graph.node_ids[i], i);
  finalize_graph(out.graph);
  return out;
}

}  // namespace foodsig
