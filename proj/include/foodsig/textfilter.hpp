#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace foodsig {

enum class FilterTarget { tweet_text, profile_text, hashtags };

FilterTarget filter_target_from_string(std::string_view s);
std::string to_string(FilterTarget t);

struct KeywordFilter {
  std::string name;
  std::vector<std::string> terms;                  // lowercase, as loaded
  std::vector<std::vector<std::string>> phrases;   // tokenized terms
  FilterTarget target = FilterTarget::profile_text;
};

KeywordFilter make_filter(std::string name, const std::vector<std::string>& terms,
                          FilterTarget target);

// One lowercase term per line; blank lines and lines starting with '#' are
// skipped. Filter name defaults to the file stem.
KeywordFilter load_filter(const std::string& path, FilterTarget target);

// True iff any filter term occurs as a token (or consecutive token phrase).
bool filter_matches_tokens(const KeywordFilter& f, const std::vector<std::string>& tokens);

// Hashtag-target matching: terms are tags without '#', compared to the list.
bool filter_matches_hashtags(const KeywordFilter& f, const std::vector<std::string>& hashtags);

bool apply_filter(const KeywordFilter& f, std::string_view text);

enum class NBLabel { food, not_food };

NBLabel nb_label_from_string(std::string_view s);
std::string to_string(NBLabel l);

// Multinomial unigram Naive Bayes with additive smoothing. The (V+1)-slot
// denominator reserves smoothed mass for unseen tokens.
struct NBModel {
  double log_prior_food = 0.0;
  double log_prior_not = 0.0;
  std::unordered_map<std::string, std::pair<double, double>> log_lik;  // token -> (food, not)
  double log_unknown_food = 0.0;
  double log_unknown_not = 0.0;
  std::size_t vocabulary_size = 0;
  double alpha = 1.0;
};

using NBExample = std::pair<std::vector<std::string>, NBLabel>;

NBModel nb_train(const std::vector<NBExample>& examples, double alpha = 1.0);

// CSV schema: text,label with label in {food,not_food}.
NBModel nb_train_csv(const std::string& path, double alpha = 1.0);

struct NBDecision {
  NBLabel label = NBLabel::not_food;
  double posterior = 0.5;  // normalized probability of the chosen label
};

NBDecision nb_classify(const NBModel& m, const std::vector<std::string>& tokens);

}  // namespace foodsig
