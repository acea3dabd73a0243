#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "foodsig/corpus.hpp"
#include "foodsig/lexicon.hpp"
#include "foodsig/textfilter.hpp"

namespace foodsig {

struct TweetStats {
  std::size_t n_tweets = 0;
  std::size_t n_retweets = 0;
  std::size_t n_replies = 0;
  std::size_t n_hashtags = 0;
};

// Index into the per-class caloric averages (mirrors ClassFilter).
inline constexpr std::size_t kClassFilterCount = 4;
inline std::size_t class_filter_index(ClassFilter f) { return static_cast<std::size_t>(f); }

struct UserFeatures {
  std::string user_id;
  std::set<std::string> food_indicators;      // surfaces mentioned at least once
  std::set<std::string> category_indicators;  // category-lexicon hits in the profile
  std::set<std::string> hashtag_indicators;   // hashtags used at least once
  std::array<std::optional<double>, kClassFilterCount> avg_cal_by_class;
  double food_tweet_fraction = 0.0;
  TweetStats tweet_stats;
  CensusRecord demographics;  // census record of the home county
  std::string zip, county, state;
  Gender gender = Gender::none;
  std::set<std::string> interests;                 // keyword-filter names that fired
  std::map<std::string, double> prominence_scores;  // area -> aggregate score (> 0 only)

  std::optional<double> avg_cal() const { return avg_cal_by_class[0]; }
};

// Generic category -> terms lexicon (binary per-profile hit semantics).
struct CategoryLexicon {
  std::vector<KeywordFilter> filters;  // one per category, target profile_text

  // CSV schema: category,term
  static CategoryLexicon load_csv(const std::string& path);
  std::vector<std::string> categories() const;
};

// area -> (account -> prominence score in [0,100]), top 200 accounts per area.
struct ProminenceTable {
  std::map<std::string, std::map<std::string, double>> areas;

  // CSV schema: account_id,area,score
  static ProminenceTable load_csv(const std::string& path, std::size_t per_area_cap = 200);
};

struct FeatureInputs {
  const FoodLexicon* lexicon = nullptr;
  const CategoryLexicon* categories = nullptr;
  const std::vector<KeywordFilter>* filters = nullptr;        // interest filters
  const std::unordered_map<std::string, CensusRecord>* census_by_county = nullptr;
  const GeoMapping* geo = nullptr;
  const ProminenceTable* prominence = nullptr;  // optional
  const NBModel* nb_prefilter = nullptr;        // optional food-topic gate
  bool exclude_replies_retweets = false;        // skip replies/retweets in matching
};

// nullopt when the user has no home zip or no census-covered county
// (callers count the skips). Tweet stats always cover all tweets passed in.
std::optional<UserFeatures> build_user_features(const UserProfile& user,
                                                const std::vector<const TweetRecord*>& tweets,
                                                const std::string& home_zip,
                                                const FeatureInputs& inputs);

// Sum of the prominence scores of followed prominent accounts, per area.
std::map<std::string, double> prominence_aggregate(const std::unordered_set<std::string>& friend_ids,
                                                   const ProminenceTable& table);

// Mean aggregate per area over users with a nonzero aggregate.
std::map<std::string, double> prominence_area_means(const std::vector<UserFeatures>& users);

// Indicator: aggregate >= the area mean over potentially-interested users.
std::map<std::string, bool> interest_scores(const std::map<std::string, double>& aggregate,
                                            const std::map<std::string, double>& area_means);

enum class RegionLevel { county, state };

struct RegionAggregate {
  std::string region_id;
  std::string state;  // parent state for county rows; == region_id for states
  std::size_t n_users = 0;
  std::map<std::string, double> food_weights;      // proportion of users mentioning it
  std::map<std::string, double> category_weights;
  std::map<std::string, double> hashtag_weights;   // over the supplied hashtag vocabulary
  std::array<std::optional<double>, kClassFilterCount> mean_avg_cal;
  std::array<double, 4> stat_means{};              // tweets, retweets, replies, hashtags
  std::optional<CensusRecord> demographics;
  HealthOutcome outcome;
};

// The corpus-wide top-k hashtags by number of users, ties alphabetical.
std::vector<std::string> top_hashtags(const std::vector<UserFeatures>& users, std::size_t k);

// Regions below min_users are dropped; regions lacking a health outcome are
// dropped with a count. Weights are user proportions, exactly count/n_users.
std::vector<RegionAggregate> aggregate_region(
    const std::vector<UserFeatures>& users, RegionLevel level, std::size_t min_users,
    const std::unordered_map<std::string, CensusRecord>& census_by_region,
    const std::unordered_map<std::string, HealthOutcome>& outcome_by_region,
    const std::vector<std::string>& hashtag_vocab = {}, std::size_t* dropped_no_outcome = nullptr);

}  // namespace foodsig
