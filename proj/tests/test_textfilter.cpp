#include <doctest.h>

#include <cmath>

#include "foodsig/csv.hpp"
#include "foodsig/error.hpp"
#include "foodsig/lexicon.hpp"
#include "foodsig/rng.hpp"
#include "foodsig/textfilter.hpp"
#include "test_util.hpp"

using namespace foodsig;

TEST_CASE("apply_filter") {
  KeywordFilter cooking = make_filter("cooking", {"chef", "cooking"}, FilterTarget::profile_text);
  CHECK(apply_filter(cooking, "home chef and mom"));
  CHECK_FALSE(apply_filter(cooking, ""));
  CHECK_FALSE(apply_filter(cooking, "nothing relevant here"));
  CHECK(apply_filter(cooking, "Chef!"));  // tokenization lowercases and strips

  KeywordFilter fat = make_filter("fatproblems", {"fatgirlproblems", "fatguyproblems"},
                                  FilterTarget::hashtags);
  CHECK(filter_matches_hashtags(fat, {"mondaymood", "fatgirlproblems"}));
  CHECK_FALSE(filter_matches_hashtags(fat, {"mondaymood"}));
  CHECK_FALSE(filter_matches_hashtags(fat, {}));
}

TEST_CASE("phrase terms match consecutive tokens only") {
  KeywordFilter family = make_filter("family", {"proud mom"}, FilterTarget::profile_text);
  CHECK(apply_filter(family, "a proud mom here"));
  CHECK_FALSE(apply_filter(family, "proud of my mom"));
}

TEST_CASE("filter monotonicity: adding terms never flips true to false") {
  Rng rng(31);
  std::vector<std::string> pool = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta"};
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::string> terms;
    std::size_t n_terms = 1 + rng.below(3);
    for (std::size_t i = 0; i < n_terms; ++i) terms.push_back(pool[rng.below(pool.size())]);
    std::string text;
    for (std::size_t i = 0; i < 6; ++i) text += pool[rng.below(pool.size())] + " ";
    KeywordFilter f = make_filter("f", terms, FilterTarget::profile_text);
    bool before = apply_filter(f, text);
    terms.push_back(pool[rng.below(pool.size())]);
    KeywordFilter g = make_filter("g", terms, FilterTarget::profile_text);
    bool after = apply_filter(g, text);
    if (before) CHECK(after);
  }
}

TEST_CASE("load_filter skips comments and names by stem") {
  testutil::TempDir dir("filter");
  write_text_file(dir.file("organic.txt"), "# comment line\n\norganic\nfarm to table\n");
  KeywordFilter f = load_filter(dir.file("organic.txt"), FilterTarget::profile_text);
  CHECK(f.name == "organic");
  CHECK(f.terms.size() == 2);
  CHECK(apply_filter(f, "all about farm to table dining"));

  write_text_file(dir.file("empty.txt"), "# nothing\n");
  CHECK_THROWS_AS(load_filter(dir.file("empty.txt"), FilterTarget::profile_text), DataError);
}

TEST_CASE("nb_train smoothed two-example model") {
  std::vector<NBExample> examples = {
      {{"pizza", "yum"}, NBLabel::food},
      {{"car", "fast"}, NBLabel::not_food},
  };
  NBModel m = nb_train(examples, 1.0);
  CHECK(m.vocabulary_size == 4);
  CHECK(std::exp(m.log_prior_food) == doctest::Approx(0.5));

  // hand computation: V=4, denominators 2 + 1*(4+1) = 7,
  // P(pizza|food) = 2/7, P(pizza|not) = 1/7 -> posterior(food) = 2/3
  NBDecision d = nb_classify(m, {"pizza"});
  CHECK(d.label == NBLabel::food);
  CHECK(d.posterior == doctest::Approx(2.0 / 3.0));

  CHECK(nb_classify(m, {"pizza", "yum"}).label == NBLabel::food);
  CHECK(nb_classify(m, {"car"}).label == NBLabel::not_food);

  CHECK_THROWS_AS(nb_train(examples, 0.0), ConfigError);
  CHECK_THROWS_AS(nb_train({{{"a"}, NBLabel::food}}, 1.0), DataError);
}

TEST_CASE("nb_classify priors drive empty and unseen inputs") {
  // the 583 positive / 1574 negative label mix
  std::vector<NBExample> examples;
  for (int i = 0; i < 583; ++i) examples.push_back({{"meal"}, NBLabel::food});
  for (int i = 0; i < 1574; ++i) examples.push_back({{"other"}, NBLabel::not_food});
  NBModel m = nb_train(examples);
  CHECK(std::exp(m.log_prior_food) == doctest::Approx(583.0 / 2157.0));

  NBDecision empty = nb_classify(m, {});
  CHECK(empty.label == NBLabel::not_food);
  CHECK(empty.posterior == doctest::Approx(1574.0 / 2157.0));

  NBDecision unseen = nb_classify(m, {"zzz", "qqq"});
  CHECK(unseen.label == NBLabel::not_food);  // unseen tokens cancel to the prior ratio
}

TEST_CASE("adding an identical document to both classes keeps decisions stable") {
  Rng rng(77);
  std::vector<std::string> food_words = {"pizza", "lunch", "tasty", "dinner", "recipe"};
  std::vector<std::string> other_words = {"car", "game", "road", "office", "match"};
  std::vector<NBExample> examples;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> doc;
    for (int k = 0; k < 4; ++k) doc.push_back(food_words[rng.below(food_words.size())]);
    examples.push_back({doc, NBLabel::food});
  }
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> doc;
    for (int k = 0; k < 4; ++k) doc.push_back(other_words[rng.below(other_words.size())]);
    examples.push_back({doc, NBLabel::not_food});
  }
  NBModel before = nb_train(examples);

  std::vector<NBExample> augmented = examples;
  std::vector<std::string> shared_doc = {"weather", "report", "tonight"};
  augmented.push_back({shared_doc, NBLabel::food});
  augmented.push_back({shared_doc, NBLabel::not_food});
  NBModel after = nb_train(augmented);

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> doc;
    std::size_t len = 1 + rng.below(5);
    for (std::size_t k = 0; k < len; ++k) {
      const auto& pool = rng.chance(0.5) ? food_words : other_words;
      doc.push_back(pool[rng.below(pool.size())]);
    }
    CHECK(nb_classify(before, doc).label == nb_classify(after, doc).label);
  }
}

TEST_CASE("nb_train_csv reads the sample training file") {
  NBModel m = nb_train_csv(testutil::data_file("sample_nb_training.csv"));
  CHECK(nb_classify(m, tokenize("pizza for lunch")).label == NBLabel::food);
  CHECK(nb_classify(m, tokenize("stuck in traffic")).label == NBLabel::not_food);
}
