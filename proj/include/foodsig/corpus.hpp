#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace foodsig {

enum class Gender { none, female, male };

Gender gender_from_string(std::string_view s);
std::string to_string(Gender g);

struct TweetRecord {
  std::string tweet_id;
  std::string user_id;
  std::int64_t timestamp = 0;  // UTC seconds
  std::string text;
  std::optional<std::string> zip;  // 5-digit code
  bool is_reply = false;
  bool is_retweet = false;
  std::vector<std::string> hashtags;  // lowercase, without '#'
  std::vector<std::string> mentions;  // user ids, without '@'
};

struct UserProfile {
  std::string user_id;
  std::string screen_name;
  std::optional<std::string> first_name;
  std::string profile_text;
  std::unordered_set<std::string> follower_ids;
  std::unordered_set<std::string> friend_ids;  // accounts the user follows
  std::optional<std::string> home_zip;
  Gender gender = Gender::none;
};

struct CensusRecord {
  std::string region_id;  // zip, county, or state code
  double under_18 = 0.0;
  double over_65 = 0.0;
  double female = 0.0;
  double afro_hispanic = 0.0;
  double median_income = 0.0;  // USD, > 0
  double bachelor_rate = 0.0;
};

struct HealthOutcome {
  std::string region_id;
  double obesity_rate = 0.0;   // percent
  double diabetes_rate = 0.0;  // percent
};

struct GeoMapping {
  std::unordered_map<std::string, std::string> zip_to_county;
  std::unordered_map<std::string, std::string> county_to_state;
  std::unordered_set<std::string> metro_zips;

  std::optional<std::string> county_of_zip(const std::string& zip) const;
  std::optional<std::string> state_of_county(const std::string& county) const;
  std::optional<std::string> state_of_zip(const std::string& zip) const;
};

// hashtags/mentions as re-extracted from tokenized text ('#'/'@' stripped).
std::vector<std::string> extract_hashtags(std::string_view text);
std::vector<std::string> extract_mentions(std::string_view text);

struct IngestReport {
  std::size_t lines = 0;
  std::size_t records = 0;
  std::size_t malformed = 0;  // line does not parse at all
  std::size_t rejected = 0;   // parses but fails field validation
  std::vector<std::string> messages;  // "<path>:<line>: <reason>", capped

  void note(const std::string& path, std::size_t lineno, const std::string& what,
            std::size_t cap = 100);
  std::string summary() const;
};

struct IngestOptions {
  double max_malformed_fraction = 0.01;  // abort above this share of lines
  std::size_t max_messages = 100;
};

// Line-delimited JSON ingestion. Duplicate ids abort naming the id; a
// malformed share above the threshold aborts with the line-numbered report.
std::vector<TweetRecord> ingest_tweets(const std::string& path, IngestReport& report,
                                       const IngestOptions& options = {});
std::vector<UserProfile> ingest_profiles(const std::string& path, IngestReport& report,
                                         const IngestOptions& options = {});

// CSV ingestion (header required, codes are zero-padded strings).
std::vector<CensusRecord> ingest_census(const std::string& path, IngestReport& report,
                                        const IngestOptions& options = {});
std::vector<HealthOutcome> ingest_health(const std::string& path, IngestReport& report,
                                         const IngestOptions& options = {});
GeoMapping ingest_geo(const std::string& zip_county_path, const std::string& county_state_path,
                      const std::string& metro_zips_path);

// name -> gender table; keys lowercased on load.
std::unordered_map<std::string, Gender> ingest_name_table(const std::string& path);

// Modal zip per user over geo-tagged tweets; ties break to the smallest zip.
// Users with no geo-tagged tweet are omitted.
std::unordered_map<std::string, std::string> assign_home_zip(const std::vector<TweetRecord>& tweets);

// Lookup key for the gender table: first_name if present, else the first
// whitespace token of screen_name; lowercased, punctuation stripped.
std::string first_name_key(const UserProfile& p);

struct GenderReport {
  std::size_t female = 0, male = 0, none = 0;
  bool empty_table = false;
  double coverage() const {
    std::size_t total = female + male + none;
    return total == 0 ? 0.0 : static_cast<double>(female + male) / static_cast<double>(total);
  }
};

GenderReport assign_gender(std::vector<UserProfile>& profiles,
                           const std::unordered_map<std::string, Gender>& name_table);

enum class UrbanLabel { urban, rural };

// urban iff home zip is in the metro set; unknown zips degrade to rural.
std::unordered_map<std::string, UrbanLabel> label_urban(
    const std::unordered_map<std::string, std::string>& user_zip, const GeoMapping& geo,
    std::size_t* unmapped_count = nullptr);

// Drops profiles whose gender is still none (the user-level default filter).
std::vector<UserProfile> exclude_none_gender(std::vector<UserProfile> profiles);

}  // namespace foodsig
