#include "foodsig/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "foodsig/csv.hpp"
#include "foodsig/error.hpp"
#include "foodsig/lexicon.hpp"
#include "foodsig/strutil.hpp"

namespace foodsig {

using nlohmann::json;

Gender gender_from_string(std::string_view s) {
  if (s == "female") return Gender::female;
  if (s == "male") return Gender::male;
  if (s == "none") return Gender::none;
  throw DataError("unknown gender: '" + std::string(s) + "'");
}

std::string to_string(Gender g) {
  switch (g) {
    case Gender::female: return "female";
    case Gender::male: return "male";
    case Gender::none: return "none";
  }
  return "none";
}

std::optional<std::string> GeoMapping::county_of_zip(const std::string& zip) const {
  auto it = zip_to_county.find(zip);
  if (it == zip_to_county.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> GeoMapping::state_of_county(const std::string& county) const {
  auto it = county_to_state.find(county);
  if (it == county_to_state.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> GeoMapping::state_of_zip(const std::string& zip) const {
  auto county = county_of_zip(zip);
  if (!county) return std::nullopt;
  return state_of_county(*county);
}

std::vector<std::string> extract_hashtags(std::string_view text) {
  std::vector<std::string> tags;
  for (const auto& tok : tokenize(text))
    if (tok.size() > 1 && tok.front() == '#') tags.push_back(tok.substr(1));
  return tags;
}

std::vector<std::string> extract_mentions(std::string_view text) {
  std::vector<std::string> ids;
  for (const auto& tok : tokenize(text))
    if (tok.size() > 1 && tok.front() == '@') ids.push_back(tok.substr(1));
  return ids;
}

void IngestReport::note(const std::string& path, std::size_t lineno, const std::string& what,
                        std::size_t cap) {
  if (messages.size() < cap) messages.push_back(path + ":" + std::to_string(lineno) + ": " + what);
}

std::string IngestReport::summary() const {
  std::string s = std::to_string(records) + " records, " + std::to_string(malformed) +
                  " malformed, " + std::to_string(rejected) + " rejected of " +
                  std::to_string(lines) + " lines";
  for (const auto& m : messages) {
    s += "\n  ";
    s += m;
  }
  return s;
}

namespace {

bool is_zip_code(std::string_view s) {
  if (s.size() != 5) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Identifiers may arrive as JSON strings or integers.
std::string id_field(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw DataError(std::string("field '") + key + "' must be a string or integer");
}

void check_malformed_share(const std::string& path, const IngestReport& report,
                           const IngestOptions& options) {
  if (report.lines == 0) return;
  double share = static_cast<double>(report.malformed) / static_cast<double>(report.lines);
  if (share > options.max_malformed_fraction)
    throw DataError(path + ": " + std::to_string(report.malformed) + "/" +
                    std::to_string(report.lines) + " lines malformed (limit " +
                    std::to_string(options.max_malformed_fraction) + ")\n" + report.summary());
}

template <class Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    fn(lineno, line);
  }
}

}  // namespace

std::vector<TweetRecord> ingest_tweets(const std::string& path, IngestReport& report,
                                       const IngestOptions& options) {
  std::vector<TweetRecord> tweets;
  std::unordered_set<std::string> seen_ids;
  for_each_line(path, [&](std::size_t lineno, const std::string& line) {
    ++report.lines;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      ++report.malformed;
      report.note(path, lineno, "not a JSON object", options.max_messages);
      return;
    }
    try {
      TweetRecord t;
      t.tweet_id = id_field(j, "tweet_id");
      t.user_id = id_field(j, "user_id");
      t.timestamp = j.at("timestamp").get<std::int64_t>();
      t.text = j.at("text").get<std::string>();
      if (j.contains("zip") && !j.at("zip").is_null()) {
        std::string zip = j.at("zip").get<std::string>();
        if (!is_zip_code(zip)) throw DataError("zip '" + zip + "' is not a 5-digit code");
        t.zip = std::move(zip);
      }
      t.is_reply = j.value("is_reply", false);
      t.is_retweet = j.value("is_retweet", false);
      auto derived_tags = extract_hashtags(t.text);
      auto derived_mentions = extract_mentions(t.text);
      if (j.contains("hashtags")) {
        auto stored = j.at("hashtags").get<std::vector<std::string>>();
        if (stored != derived_tags) throw DataError("hashtags do not match text");
        t.hashtags = std::move(stored);
      } else {
        t.hashtags = std::move(derived_tags);
      }
      if (j.contains("mentions")) {
        std::vector<std::string> stored;
        for (const auto& v : j.at("mentions"))
          stored.push_back(v.is_string() ? v.get<std::string>()
                                         : std::to_string(v.get<std::int64_t>()));
        if (stored != derived_mentions) throw DataError("mentions do not match text");
        t.mentions = std::move(stored);
      } else {
        t.mentions = std::move(derived_mentions);
      }
      if (!seen_ids.insert(t.tweet_id).second)
        throw DataError("duplicate tweet_id '" + t.tweet_id + "' at " + path + ":" +
                        std::to_string(lineno));
      tweets.push_back(std::move(t));
      ++report.records;
    } catch (const DataError& e) {
      if (std::string_view(e.what()).starts_with("duplicate tweet_id")) throw;
      ++report.rejected;
      report.note(path, lineno, e.what(), options.max_messages);
    } catch (const json::exception& e) {
      ++report.rejected;
      report.note(path, lineno, e.what(), options.max_messages);
    }
  });
  check_malformed_share(path, report, options);
  return tweets;
}

std::vector<UserProfile> ingest_profiles(const std::string& path, IngestReport& report,
                                         const IngestOptions& options) {
  std::vector<UserProfile> profiles;
  std::unordered_set<std::string> seen_ids;
  for_each_line(path, [&](std::size_t lineno, const std::string& line) {
    ++report.lines;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      ++report.malformed;
      report.note(path, lineno, "not a JSON object", options.max_messages);
      return;
    }
    try {
      UserProfile p;
      p.user_id = id_field(j, "user_id");
      p.screen_name = j.at("screen_name").get<std::string>();
      if (j.contains("first_name") && !j.at("first_name").is_null())
        p.first_name = j.at("first_name").get<std::string>();
      p.profile_text = j.value("profile_text", std::string());
      auto read_ids = [&](const char* key, std::unordered_set<std::string>& out) {
        if (!j.contains(key)) return;
        for (const auto& v : j.at(key)) {
          std::string id =
              v.is_string() ? v.get<std::string>() : std::to_string(v.get<std::int64_t>());
          if (id != p.user_id) out.insert(std::move(id));  // no self-loops
        }
      };
      read_ids("follower_ids", p.follower_ids);
      read_ids("friend_ids", p.friend_ids);
      if (j.contains("home_zip") && !j.at("home_zip").is_null()) {
        std::string zip = j.at("home_zip").get<std::string>();
        if (!is_zip_code(zip)) throw DataError("home_zip '" + zip + "' is not a 5-digit code");
        p.home_zip = std::move(zip);
      }
      if (j.contains("gender")) p.gender = gender_from_string(j.at("gender").get<std::string>());
      if (!seen_ids.insert(p.user_id).second)
        throw DataError("duplicate user_id '" + p.user_id + "' at " + path + ":" +
                        std::to_string(lineno));
      profiles.push_back(std::move(p));
      ++report.records;
    } catch (const DataError& e) {
      if (std::string_view(e.what()).starts_with("duplicate user_id")) throw;
      ++report.rejected;
      report.note(path, lineno, e.what(), options.max_messages);
    } catch (const json::exception& e) {
      ++report.rejected;
      report.note(path, lineno, e.what(), options.max_messages);
    }
  });
  check_malformed_share(path, report, options);
  return profiles;
}

namespace {

double parse_number(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw DataError("");
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("bad ") + what + " value '" + s + "'");
  }
}

}  // namespace

std::vector<CensusRecord> ingest_census(const std::string& path, IngestReport& report,
                                        const IngestOptions& options) {
  CsvTable table = read_csv(path);
  std::size_t c_region = table.col("region_id");
  std::size_t c_u18 = table.col("under_18");
  std::size_t c_o65 = table.col("over_65");
  std::size_t c_female = table.col("female");
  std::size_t c_ah = table.col("afro_hispanic");
  std::size_t c_income = table.col("median_income");
  std::size_t c_bach = table.col("bachelor_rate");
  std::vector<CensusRecord> out;
  std::unordered_set<std::string> seen;
  std::size_t lineno = 1;
  for (const auto& row : table.rows) {
    ++lineno;
    ++report.lines;
    try {
      CensusRecord r;
      r.region_id = row[c_region];
      if (r.region_id.empty()) throw DataError("empty region_id");
      r.under_18 = parse_number(row[c_u18], "under_18");
      r.over_65 = parse_number(row[c_o65], "over_65");
      r.female = parse_number(row[c_female], "female");
      r.afro_hispanic = parse_number(row[c_ah], "afro_hispanic");
      r.median_income = parse_number(row[c_income], "median_income");
      r.bachelor_rate = parse_number(row[c_bach], "bachelor_rate");
      for (double frac : {r.under_18, r.over_65, r.female, r.afro_hispanic, r.bachelor_rate})
        if (frac < 0.0 || frac > 1.0) throw DataError("fraction outside [0,1]");
      if (!(r.median_income > 0.0)) throw DataError("median_income must be > 0");
      if (!seen.insert(r.region_id).second)
        throw DataError("duplicate region_id '" + r.region_id + "'");
      out.push_back(std::move(r));
      ++report.records;
    } catch (const DataError& e) {
      if (std::string_view(e.what()).starts_with("duplicate region_id"))
        throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
      ++report.rejected;
      report.note(path, lineno, e.what(), options.max_messages);
    }
  }
  return out;
}

std::vector<HealthOutcome> ingest_health(const std::string& path, IngestReport& report,
                                         const IngestOptions& options) {
  CsvTable table = read_csv(path);
  std::size_t c_region = table.col("region_id");
  std::size_t c_obesity = table.col("obesity_rate");
  std::size_t c_diabetes = table.col("diabetes_rate");
  std::vector<HealthOutcome> out;
  std::unordered_set<std::string> seen;
  std::size_t lineno = 1;
  for (const auto& row : table.rows) {
    ++lineno;
    ++report.lines;
    try {
      HealthOutcome h;
      h.region_id = row[c_region];
      if (h.region_id.empty()) throw DataError("empty region_id");
      h.obesity_rate = parse_number(row[c_obesity], "obesity_rate");
      h.diabetes_rate = parse_number(row[c_diabetes], "diabetes_rate");
      for (double rate : {h.obesity_rate, h.diabetes_rate})
        if (rate < 0.0 || rate > 100.0) throw DataError("rate outside [0,100]");
      if (!seen.insert(h.region_id).second)
        throw DataError("duplicate region_id '" + h.region_id + "'");
      out.push_back(std::move(h));
      ++report.records;
    } catch (const DataError& e) {
      if (std::string_view(e.what()).starts_with("duplicate region_id"))
        throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
      ++report.rejected;
      report.note(path, lineno, e.what(), options.max_messages);
    }
  }
  return out;
}

GeoMapping ingest_geo(const std::string& zip_county_path, const std::string& county_state_path,
                      const std::string& metro_zips_path) {
  GeoMapping geo;
  {
    CsvTable t = read_csv(zip_county_path);
    std::size_t c_zip = t.col("zip"), c_county = t.col("county");
    for (const auto& row : t.rows) {
      if (!is_zip_code(row[c_zip]))
        throw DataError(zip_county_path + ": bad zip '" + row[c_zip] + "'");
      if (!geo.zip_to_county.emplace(row[c_zip], row[c_county]).second)
        throw DataError(zip_county_path + ": duplicate zip '" + row[c_zip] + "'");
    }
  }
  {
    CsvTable t = read_csv(county_state_path);
    std::size_t c_county = t.col("county"), c_state = t.col("state");
    for (const auto& row : t.rows)
      if (!geo.county_to_state.emplace(row[c_county], row[c_state]).second)
        throw DataError(county_state_path + ": duplicate county '" + row[c_county] + "'");
  }
  {
    CsvTable t = read_csv(metro_zips_path);
    std::size_t c_zip = t.col("zip");
    for (const auto& row : t.rows) geo.metro_zips.insert(row[c_zip]);
  }
  for (const auto& [zip, county] : geo.zip_to_county)
    if (!geo.county_to_state.contains(county))
      throw DataError("geo: county '" + county + "' (zip " + zip + ") has no state mapping");
  return geo;
}

std::unordered_map<std::string, Gender> ingest_name_table(const std::string& path) {
  CsvTable table = read_csv(path);
  std::size_t c_name = table.col("name"), c_gender = table.col("gender");
  std::unordered_map<std::string, Gender> out;
  for (const auto& row : table.rows) {
    Gender g = gender_from_string(trim(row[c_gender]));
    if (g == Gender::none) throw DataError(path + ": name table entries must be female or male");
    out[to_lower_ascii(trim(row[c_name]))] = g;
  }
  return out;
}

std::unordered_map<std::string, std::string> assign_home_zip(
    const std::vector<TweetRecord>& tweets) {
  // zip -> count per user; modal zip, ties to the lexicographically smallest.
  std::unordered_map<std::string, std::map<std::string, std::size_t>> counts;
  for (const auto& t : tweets)
    if (t.zip) counts[t.user_id][*t.zip]++;
  std::unordered_map<std::string, std::string> out;
  out.reserve(counts.size());
  for (const auto& [user, zips] : counts) {
    const std::string* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [zip, count] : zips) {  // std::map: ascending zip order
      if (count > best_count) {
        best = &zip;
        best_count = count;
      }
    }
    out.emplace(user, *best);
  }
  return out;
}

std::string first_name_key(const UserProfile& p) {
  std::string base;
  if (p.first_name && !p.first_name->empty()) {
    base = *p.first_name;
  } else {
    std::string_view v = trim(p.screen_name);
    std::size_t end = 0;
    while (end < v.size() && !is_ascii_space(v[end])) ++end;
    base = std::string(v.substr(0, end));
  }
  std::string_view v = base;
  while (!v.empty() && is_ascii_punct(v.front())) v.remove_prefix(1);
  while (!v.empty() && is_ascii_punct(v.back())) v.remove_suffix(1);
  return to_lower_ascii(v);
}

GenderReport assign_gender(std::vector<UserProfile>& profiles,
                           const std::unordered_map<std::string, Gender>& name_table) {
  GenderReport report;
  report.empty_table = name_table.empty();
  for (auto& p : profiles) {
    auto it = name_table.find(first_name_key(p));
    p.gender = it == name_table.end() ? Gender::none : it->second;
    switch (p.gender) {
      case Gender::female: ++report.female; break;
      case Gender::male: ++report.male; break;
      case Gender::none: ++report.none; break;
    }
  }
  return report;
}

std::unordered_map<std::string, UrbanLabel> label_urban(
    const std::unordered_map<std::string, std::string>& user_zip, const GeoMapping& geo,
    std::size_t* unmapped_count) {
  std::unordered_map<std::string, UrbanLabel> out;
  out.reserve(user_zip.size());
  std::size_t unmapped = 0;
  for (const auto& [user, zip] : user_zip) {
    bool urban = geo.metro_zips.contains(zip);
    if (!urban && !geo.zip_to_county.contains(zip)) ++unmapped;
    out.emplace(user, urban ? UrbanLabel::urban : UrbanLabel::rural);
  }
  if (unmapped_count) *unmapped_count = unmapped;
  return out;
}

std::vector<UserProfile> exclude_none_gender(std::vector<UserProfile> profiles) {
  std::erase_if(profiles, [](const UserProfile& p) { return p.gender == Gender::none; });
  return profiles;
}

}  // namespace foodsig
