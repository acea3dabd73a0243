#include "foodsig/features.hpp"

#include <algorithm>

#include "foodsig/csv.hpp"
#include "foodsig/error.hpp"
#include "foodsig/strutil.hpp"

namespace foodsig {

CategoryLexicon CategoryLexicon::load_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  std::size_t c_cat = table.col("category");
  std::size_t c_term = table.col("term");
  std::map<std::string, std::vector<std::string>> terms;
  for (const auto& row : table.rows) {
    std::string cat = to_lower_ascii(trim(row[c_cat]));
    if (cat.empty()) throw DataError(path + ": empty category");
    terms[cat].push_back(row[c_term]);
  }
  CategoryLexicon lex;
  for (auto& [cat, list] : terms)
    lex.filters.push_back(make_filter(cat, list, FilterTarget::profile_text));
  return lex;
}

std::vector<std::string> CategoryLexicon::categories() const {
  std::vector<std::string> out;
  out.reserve(filters.size());
  for (const auto& f : filters) out.push_back(f.name);
  return out;
}

ProminenceTable ProminenceTable::load_csv(const std::string& path, std::size_t per_area_cap) {
  CsvTable table = read_csv(path);
  std::size_t c_acc = table.col("account_id");
  std::size_t c_area = table.col("area");
  std::size_t c_score = table.col("score");
  std::map<std::string, std::vector<std::pair<std::string, double>>> rows;
  for (const auto& row : table.rows) {
    double score;
    try {
      score = std::stod(row[c_score]);
    } catch (const std::exception&) {
      throw DataError(path + ": bad score '" + row[c_score] + "'");
    }
    if (score < 0.0 || score > 100.0) throw DataError(path + ": score outside [0,100]");
    rows[to_lower_ascii(trim(row[c_area]))].emplace_back(row[c_acc], score);
  }
  ProminenceTable out;
  for (auto& [area, accounts] : rows) {
    // keep the top per_area_cap accounts by score, ties by account id
    std::sort(accounts.begin(), accounts.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (accounts.size() > per_area_cap) accounts.resize(per_area_cap);
    auto& dst = out.areas[area];
    for (auto& [acc, score] : accounts)
      if (!dst.emplace(acc, score).second)
        throw DataError(path + ": duplicate account '" + acc + "' in area '" + area + "'");
  }
  return out;
}

std::map<std::string, double> prominence_aggregate(const std::unordered_set<std::string>& friend_ids,
                                                   const ProminenceTable& table) {
  std::map<std::string, double> out;
  for (const auto& [area, accounts] : table.areas) {
    double sum = 0.0;
    for (const auto& [acc, score] : accounts)
      if (friend_ids.contains(acc)) sum += score;
    if (sum > 0.0) out.emplace(area, sum);
  }
  return out;
}

std::map<std::string, double> prominence_area_means(const std::vector<UserFeatures>& users) {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& u : users)
    for (const auto& [area, score] : u.prominence_scores) {
      auto& a = acc[area];
      a.first += score;
      a.second += 1;
    }
  std::map<std::string, double> means;
  for (const auto& [area, a] : acc) means.emplace(area, a.first / static_cast<double>(a.second));
  return means;
}

std::map<std::string, bool> interest_scores(const std::map<std::string, double>& aggregate,
                                            const std::map<std::string, double>& area_means) {
  std::map<std::string, bool> out;
  for (const auto& [area, mean_score] : area_means) {
    auto it = aggregate.find(area);
    out[area] = it != aggregate.end() && it->second >= mean_score;
  }
  return out;
}

std::optional<UserFeatures> build_user_features(const UserProfile& user,
                                                const std::vector<const TweetRecord*>& tweets,
                                                const std::string& home_zip,
                                                const FeatureInputs& inputs) {
  if (!inputs.lexicon || !inputs.geo || !inputs.census_by_county)
    throw ConfigError("build_user_features: lexicon, geo, and census inputs are required");
  auto county = inputs.geo->county_of_zip(home_zip);
  if (!county) return std::nullopt;
  auto census_it = inputs.census_by_county->find(*county);
  if (census_it == inputs.census_by_county->end()) return std::nullopt;
  auto state = inputs.geo->state_of_county(*county);
  if (!state) return std::nullopt;

  UserFeatures f;
  f.user_id = user.user_id;
  f.zip = home_zip;
  f.county = *county;
  f.state = *state;
  f.demographics = census_it->second;
  f.gender = user.gender;

  std::array<double, kClassFilterCount> cal_sum{};
  std::array<std::size_t, kClassFilterCount> cal_n{};
  std::size_t food_tweets = 0;
  for (const TweetRecord* t : tweets) {
    f.tweet_stats.n_tweets++;
    if (t->is_retweet) f.tweet_stats.n_retweets++;
    if (t->is_reply) f.tweet_stats.n_replies++;
    f.tweet_stats.n_hashtags += t->hashtags.size();
    for (const auto& tag : t->hashtags) f.hashtag_indicators.insert(tag);

    if (inputs.exclude_replies_retweets && (t->is_reply || t->is_retweet)) continue;
    std::vector<std::string> tokens = tokenize(t->text);
    if (inputs.nb_prefilter &&
        nb_classify(*inputs.nb_prefilter, tokens).label != NBLabel::food)
      continue;
    MatchResult m = match_tokens(tokens, *inputs.lexicon);
    if (m.matches.empty()) continue;
    ++food_tweets;
    for (const auto& match : m.matches) f.food_indicators.insert(match.entry->surface);
    for (std::size_t c = 0; c < kClassFilterCount; ++c) {
      auto v = tweet_avg_calories(m, static_cast<ClassFilter>(c));
      if (v) {
        cal_sum[c] += *v;
        cal_n[c] += 1;
      }
    }
  }
  f.food_tweet_fraction = f.tweet_stats.n_tweets == 0
                              ? 0.0
                              : static_cast<double>(food_tweets) /
                                    static_cast<double>(f.tweet_stats.n_tweets);
  for (std::size_t c = 0; c < kClassFilterCount; ++c)
    if (cal_n[c] > 0) f.avg_cal_by_class[c] = cal_sum[c] / static_cast<double>(cal_n[c]);

  std::vector<std::string> profile_tokens = tokenize(user.profile_text);
  if (inputs.categories)
    for (const auto& cat : inputs.categories->filters)
      if (filter_matches_tokens(cat, profile_tokens)) f.category_indicators.insert(cat.name);

  if (inputs.filters) {
    std::vector<std::string> all_hashtags(f.hashtag_indicators.begin(),
                                          f.hashtag_indicators.end());
    for (const auto& filter : *inputs.filters) {
      bool hit = false;
      switch (filter.target) {
        case FilterTarget::profile_text:
          hit = filter_matches_tokens(filter, profile_tokens);
          break;
        case FilterTarget::hashtags:
          hit = filter_matches_hashtags(filter, all_hashtags);
          break;
        case FilterTarget::tweet_text:
          for (const TweetRecord* t : tweets) {
            if (filter_matches_tokens(filter, tokenize(t->text))) {
              hit = true;
              break;
            }
          }
          break;
      }
      if (hit) f.interests.insert(filter.name);
    }
  }

  if (inputs.prominence) f.prominence_scores = prominence_aggregate(user.friend_ids, *inputs.prominence);
  return f;
}

std::vector<std::string> top_hashtags(const std::vector<UserFeatures>& users, std::size_t k) {
  std::map<std::string, std::size_t> counts;
  for (const auto& u : users)
    for (const auto& tag : u.hashtag_indicators) counts[tag]++;
  std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (items.size() > k) items.resize(k);
  std::vector<std::string> out;
  out.reserve(items.size());
  for (auto& [tag, n] : items) out.push_back(tag);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RegionAggregate> aggregate_region(
    const std::vector<UserFeatures>& users, RegionLevel level, std::size_t min_users,
    const std::unordered_map<std::string, CensusRecord>& census_by_region,
    const std::unordered_map<std::string, HealthOutcome>& outcome_by_region,
    const std::vector<std::string>& hashtag_vocab, std::size_t* dropped_no_outcome) {
  std::map<std::string, std::vector<const UserFeatures*>> by_region;
  for (const auto& u : users) {
    const std::string& region = level == RegionLevel::county ? u.county : u.state;
    by_region[region].push_back(&u);
  }
  std::vector<RegionAggregate> out;
  std::size_t dropped = 0;
  for (const auto& [region, members] : by_region) {
    if (members.size() < min_users) continue;
    auto outcome_it = outcome_by_region.find(region);
    if (outcome_it == outcome_by_region.end()) {
      ++dropped;
      continue;
    }
    RegionAggregate agg;
    agg.region_id = region;
    agg.state = level == RegionLevel::county ? members.front()->state : region;
    agg.n_users = members.size();
    agg.outcome = outcome_it->second;
    auto census_it = census_by_region.find(region);
    if (census_it != census_by_region.end()) agg.demographics = census_it->second;

    double n = static_cast<double>(members.size());
    std::map<std::string, std::size_t> food_counts, cat_counts, tag_counts;
    std::array<double, kClassFilterCount> cal_sum{};
    std::array<std::size_t, kClassFilterCount> cal_n{};
    for (const UserFeatures* u : members) {
      for (const auto& s : u->food_indicators) food_counts[s]++;
      for (const auto& s : u->category_indicators) cat_counts[s]++;
      if (!hashtag_vocab.empty())
        for (const auto& s : u->hashtag_indicators) tag_counts[s]++;
      for (std::size_t c = 0; c < kClassFilterCount; ++c)
        if (u->avg_cal_by_class[c]) {
          cal_sum[c] += *u->avg_cal_by_class[c];
          cal_n[c] += 1;
        }
      agg.stat_means[0] += static_cast<double>(u->tweet_stats.n_tweets);
      agg.stat_means[1] += static_cast<double>(u->tweet_stats.n_retweets);
      agg.stat_means[2] += static_cast<double>(u->tweet_stats.n_replies);
      agg.stat_means[3] += static_cast<double>(u->tweet_stats.n_hashtags);
    }
    for (auto& v : agg.stat_means) v /= n;
    for (const auto& [s, c] : food_counts) agg.food_weights[s] = static_cast<double>(c) / n;
    for (const auto& [s, c] : cat_counts) agg.category_weights[s] = static_cast<double>(c) / n;
    for (const auto& tag : hashtag_vocab) {
      auto it = tag_counts.find(tag);
      agg.hashtag_weights[tag] = it == tag_counts.end() ? 0.0 : static_cast<double>(it->second) / n;
    }
    for (std::size_t c = 0; c < kClassFilterCount; ++c)
      if (cal_n[c] > 0) agg.mean_avg_cal[c] = cal_sum[c] / static_cast<double>(cal_n[c]);
    out.push_back(std::move(agg));
  }
  if (dropped_no_outcome) *dropped_no_outcome = dropped;
  return out;
}

}  // namespace foodsig
