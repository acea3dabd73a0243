#include <doctest.h>

#include <json.hpp>

#include "foodsig/corpus.hpp"
#include "foodsig/csv.hpp"
#include "foodsig/error.hpp"
#include "foodsig/rng.hpp"
#include "test_util.hpp"

using namespace foodsig;
using nlohmann::json;

namespace {

std::string tweet_line(const std::string& id, const std::string& user, const std::string& text,
                       const std::string& zip = "") {
  json j;
  j["tweet_id"] = id;
  j["user_id"] = user;
  j["timestamp"] = 1700000000;
  j["text"] = text;
  if (!zip.empty()) j["zip"] = zip;
  return j.dump() + "\n";
}

}  // namespace

TEST_CASE("ingest_tweets happy path and idempotence") {
  testutil::TempDir dir("tweets");
  std::string content = tweet_line("t1", "u1", "pizza tonight", "02139") +
                        tweet_line("t2", "u1", "hello #fun @u2", "02139") +
                        tweet_line("t3", "u2", "nothing");
  write_text_file(dir.file("tweets.jsonl"), content);
  IngestReport r1, r2;
  auto a = ingest_tweets(dir.file("tweets.jsonl"), r1);
  auto b = ingest_tweets(dir.file("tweets.jsonl"), r2);
  REQUIRE(a.size() == 3);
  CHECK(r1.records == 3);
  CHECK(r1.rejected == 0);
  CHECK(a[1].hashtags == std::vector<std::string>{"fun"});
  CHECK(a[1].mentions == std::vector<std::string>{"u2"});
  CHECK(a[0].zip.value() == "02139");
  CHECK_FALSE(a[2].zip.has_value());
  // idempotence
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tweet_id == b[i].tweet_id);
    CHECK(a[i].text == b[i].text);
    CHECK(a[i].hashtags == b[i].hashtags);
  }
}

TEST_CASE("ingest_tweets duplicate id aborts naming the id") {
  testutil::TempDir dir("tweets_dup");
  write_text_file(dir.file("t.jsonl"),
                  tweet_line("t1", "u1", "a") + tweet_line("t1", "u2", "b"));
  IngestReport r;
  CHECK_THROWS_WITH_AS(ingest_tweets(dir.file("t.jsonl"), r),
                       doctest::Contains("duplicate tweet_id 't1'"), DataError);
}

TEST_CASE("ingest_tweets rejects invalid records but keeps the rest") {
  testutil::TempDir dir("tweets_rej");
  std::string content;
  for (int i = 0; i < 98; ++i)
    content += tweet_line("t" + std::to_string(i), "u" + std::to_string(i), "text");
  json missing;  // no user_id
  missing["tweet_id"] = "tx1";
  missing["timestamp"] = 5;
  missing["text"] = "x";
  content += missing.dump() + "\n";
  missing["tweet_id"] = "tx2";
  content += missing.dump() + "\n";
  write_text_file(dir.file("t.jsonl"), content);
  IngestReport r;
  auto tweets = ingest_tweets(dir.file("t.jsonl"), r);
  CHECK(tweets.size() == 98);
  CHECK(r.records == 98);
  CHECK(r.rejected == 2);
  CHECK(r.malformed == 0);
  REQUIRE(r.messages.size() == 2);
  CHECK(r.messages[0].find(":99:") != std::string::npos);  // line-numbered
  CHECK(r.messages[1].find(":100:") != std::string::npos);
}

TEST_CASE("ingest_tweets aborts above the malformed-line threshold") {
  testutil::TempDir dir("tweets_bad");
  std::string content;
  for (int i = 0; i < 97; ++i)
    content += tweet_line("t" + std::to_string(i), "u", "text");
  content += "not json at all\n{{{\ngarbage\n";
  write_text_file(dir.file("t.jsonl"), content);
  IngestReport r;
  CHECK_THROWS_AS(ingest_tweets(dir.file("t.jsonl"), r), DataError);

  // exactly 1% is allowed (the rule is "> 1%")
  testutil::TempDir dir2("tweets_ok");
  std::string ok;
  for (int i = 0; i < 99; ++i) ok += tweet_line("t" + std::to_string(i), "u", "text");
  ok += "garbage line\n";
  write_text_file(dir2.file("t.jsonl"), ok);
  IngestReport r2;
  auto tweets = ingest_tweets(dir2.file("t.jsonl"), r2);
  CHECK(tweets.size() == 99);
  CHECK(r2.malformed == 1);
}

TEST_CASE("ingest_tweets validates stored hashtags and mentions against the text") {
  testutil::TempDir dir("tweets_tags");
  json j;
  j["tweet_id"] = "t1";
  j["user_id"] = "u1";
  j["timestamp"] = 1;
  j["text"] = "hello #one @u9";
  j["hashtags"] = std::vector<std::string>{"two"};  // mismatch
  write_text_file(dir.file("t.jsonl"), j.dump() + "\n");
  IngestReport r;
  auto tweets = ingest_tweets(dir.file("t.jsonl"), r);
  CHECK(tweets.empty());
  CHECK(r.rejected == 1);

  j["hashtags"] = std::vector<std::string>{"one"};
  j["mentions"] = std::vector<std::string>{"u9"};
  write_text_file(dir.file("t2.jsonl"), j.dump() + "\n");
  IngestReport r2;
  CHECK(ingest_tweets(dir.file("t2.jsonl"), r2).size() == 1);

  // bad zip is a reject, not an abort
  json z = j;
  z["tweet_id"] = "t9";
  z["zip"] = "2139";
  write_text_file(dir.file("t3.jsonl"), z.dump() + "\n");
  IngestReport r3;
  CHECK(ingest_tweets(dir.file("t3.jsonl"), r3).empty());
  CHECK(r3.rejected == 1);
}

TEST_CASE("ingest_profiles strips self-loops and rejects duplicates") {
  testutil::TempDir dir("profiles");
  json j;
  j["user_id"] = "u1";
  j["screen_name"] = "alice_1";
  j["first_name"] = "Alice";
  j["profile_text"] = "hello";
  j["friend_ids"] = std::vector<std::string>{"u1", "u2", "u3"};
  j["follower_ids"] = std::vector<std::string>{"u2"};
  write_text_file(dir.file("p.jsonl"), j.dump() + "\n");
  IngestReport r;
  auto profiles = ingest_profiles(dir.file("p.jsonl"), r);
  REQUIRE(profiles.size() == 1);
  CHECK(profiles[0].friend_ids == std::unordered_set<std::string>{"u2", "u3"});
  CHECK(profiles[0].gender == Gender::none);

  write_text_file(dir.file("dup.jsonl"), j.dump() + "\n" + j.dump() + "\n");
  IngestReport r2;
  CHECK_THROWS_WITH_AS(ingest_profiles(dir.file("dup.jsonl"), r2),
                       doctest::Contains("duplicate user_id 'u1'"), DataError);
}

TEST_CASE("assign_home_zip modal and tie-break") {
  auto tw = [](const std::string& user, const std::string& zip) {
    TweetRecord t;
    t.tweet_id = user + zip + std::to_string(std::rand());
    t.user_id = user;
    t.zip = zip;
    return t;
  };
  SUBCASE("strict mode") {
    std::vector<TweetRecord> tweets = {tw("u1", "02139"), tw("u1", "02139"), tw("u1", "10001")};
    auto zips = assign_home_zip(tweets);
    CHECK(zips.at("u1") == "02139");
  }
  SUBCASE("tie breaks to the smallest zip") {
    std::vector<TweetRecord> tweets = {tw("u1", "10001"), tw("u1", "02139")};
    CHECK(assign_home_zip(tweets).at("u1") == "02139");
  }
  SUBCASE("users without geo tweets are omitted") {
    TweetRecord t;
    t.tweet_id = "t";
    t.user_id = "u9";
    std::vector<TweetRecord> tweets = {t};
    CHECK(assign_home_zip(tweets).empty());
  }
  SUBCASE("permutation invariance and planted-mode recovery at 1000 users") {
    Rng rng(404);
    std::vector<TweetRecord> tweets;
    std::unordered_map<std::string, std::string> planted;
    for (int u = 0; u < 1000; ++u) {
      std::string user = "u" + std::to_string(u);
      std::string mode = std::to_string(10000 + static_cast<int>(rng.below(500)));
      planted[user] = mode;
      int n_mode = 2 + static_cast<int>(rng.below(4));
      for (int k = 0; k < n_mode; ++k) {
        TweetRecord t;
        t.tweet_id = user + "_" + std::to_string(k);
        t.user_id = user;
        t.zip = mode;
        tweets.push_back(t);
      }
      // one stray zip, strictly above the mode string so ties cannot occur
      TweetRecord stray;
      stray.tweet_id = user + "_s";
      stray.user_id = user;
      stray.zip = std::to_string(90000 + static_cast<int>(rng.below(500)));
      tweets.push_back(stray);
    }
    auto zips = assign_home_zip(tweets);
    REQUIRE(zips.size() == planted.size());
    for (const auto& [user, mode] : planted) CHECK(zips.at(user) == mode);
    rng.shuffle(tweets);
    CHECK(assign_home_zip(tweets) == zips);
  }
}

TEST_CASE("assign_gender") {
  std::unordered_map<std::string, Gender> table = {{"alice", Gender::female},
                                                   {"bob", Gender::male}};
  auto profile = [](const std::string& id, const std::string& screen,
                    std::optional<std::string> first) {
    UserProfile p;
    p.user_id = id;
    p.screen_name = screen;
    p.first_name = std::move(first);
    return p;
  };
  SUBCASE("lookup by first name, fallback to screen name token") {
    std::vector<UserProfile> profiles = {
        profile("u1", "whatever", "Alice"),
        profile("u2", "Bob the builder", std::nullopt),
        profile("u3", "xq7", std::nullopt),
        profile("u4", "..Alice!!", std::nullopt),
    };
    GenderReport r = assign_gender(profiles, table);
    CHECK(profiles[0].gender == Gender::female);
    CHECK(profiles[1].gender == Gender::male);
    CHECK(profiles[2].gender == Gender::none);
    CHECK(profiles[3].gender == Gender::female);  // punctuation stripped
    CHECK(r.female == 2);
    CHECK(r.male == 1);
    CHECK(r.none == 1);
  }
  SUBCASE("coverage report on a 10-name fixture") {
    std::vector<UserProfile> profiles;
    const char* names[] = {"Alice", "Bob", "Alice", "Bob", "Alice", "Bob",
                           "Zed",   "Qrt", "Xw",    "Jjj"};
    for (int i = 0; i < 10; ++i)
      profiles.push_back(profile("u" + std::to_string(i), "sn", names[i]));
    GenderReport r = assign_gender(profiles, table);
    CHECK(r.female + r.male == 6);
    CHECK(r.none == 4);
    CHECK(r.coverage() == doctest::Approx(0.6));
  }
  SUBCASE("empty table labels everyone none and flags it") {
    std::vector<UserProfile> profiles = {profile("u1", "sn", "Alice")};
    GenderReport r = assign_gender(profiles, {});
    CHECK(profiles[0].gender == Gender::none);
    CHECK(r.empty_table);
  }
}

TEST_CASE("exclude_none_gender keeps only gendered users") {
  std::vector<UserProfile> profiles(3);
  profiles[0].gender = Gender::female;
  profiles[1].gender = Gender::none;
  profiles[2].gender = Gender::male;
  auto kept = exclude_none_gender(std::move(profiles));
  REQUIRE(kept.size() == 2);
  for (const auto& p : kept) CHECK(p.gender != Gender::none);
}

TEST_CASE("label_urban") {
  GeoMapping geo;
  geo.zip_to_county = {{"10000", "c1"}, {"10001", "c1"}};
  geo.county_to_state = {{"c1", "s1"}};
  geo.metro_zips = {"10000"};
  std::unordered_map<std::string, std::string> user_zip = {
      {"u1", "10000"}, {"u2", "10001"}, {"u3", "99999"}};
  std::size_t unmapped = 0;
  auto labels = label_urban(user_zip, geo, &unmapped);
  CHECK(labels.at("u1") == UrbanLabel::urban);
  CHECK(labels.at("u2") == UrbanLabel::rural);
  CHECK(labels.at("u3") == UrbanLabel::rural);  // unmapped degrades to rural
  CHECK(unmapped == 1);
}

TEST_CASE("csv side tables validate") {
  testutil::TempDir dir("csv");
  SUBCASE("census fractions and income") {
    write_text_file(dir.file("census.csv"),
                    "region_id,under_18,over_65,female,afro_hispanic,median_income,bachelor_rate\n"
                    "c1,0.2,0.1,0.5,0.2,55000,0.3\n"
                    "c2,1.5,0.1,0.5,0.2,55000,0.3\n"
                    "c3,0.2,0.1,0.5,0.2,-3,0.3\n");
    IngestReport r;
    auto rows = ingest_census(dir.file("census.csv"), r);
    CHECK(rows.size() == 1);
    CHECK(r.rejected == 2);
  }
  SUBCASE("health rates in range") {
    write_text_file(dir.file("health.csv"),
                    "region_id,obesity_rate,diabetes_rate\ns1,30,9\ns2,130,9\n");
    IngestReport r;
    auto rows = ingest_health(dir.file("health.csv"), r);
    CHECK(rows.size() == 1);
    CHECK(r.rejected == 1);
  }
  SUBCASE("geo requires every county to map to a state") {
    write_text_file(dir.file("zc.csv"), "zip,county\n10000,c1\n10001,c2\n");
    write_text_file(dir.file("cs.csv"), "county,state\nc1,s1\n");
    write_text_file(dir.file("mz.csv"), "zip\n10000\n");
    CHECK_THROWS_WITH_AS(ingest_geo(dir.file("zc.csv"), dir.file("cs.csv"), dir.file("mz.csv")),
                         doctest::Contains("c2"), DataError);
  }
  SUBCASE("name table lowercases keys") {
    write_text_file(dir.file("n.csv"), "name,gender\nAlice,female\nBOB,male\n");
    auto table = ingest_name_table(dir.file("n.csv"));
    CHECK(table.at("alice") == Gender::female);
    CHECK(table.at("bob") == Gender::male);
  }
}
