#include "foodsig/textfilter.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "foodsig/csv.hpp"
#include "foodsig/error.hpp"
#include "foodsig/lexicon.hpp"
#include "foodsig/strutil.hpp"

namespace foodsig {

FilterTarget filter_target_from_string(std::string_view s) {
  if (s == "tweet_text") return FilterTarget::tweet_text;
  if (s == "profile_text") return FilterTarget::profile_text;
  if (s == "hashtags") return FilterTarget::hashtags;
  throw ConfigError("unknown filter target: '" + std::string(s) + "'");
}

std::string to_string(FilterTarget t) {
  switch (t) {
    case FilterTarget::tweet_text: return "tweet_text";
    case FilterTarget::profile_text: return "profile_text";
    case FilterTarget::hashtags: return "hashtags";
  }
  return "profile_text";
}

KeywordFilter make_filter(std::string name, const std::vector<std::string>& terms,
                          FilterTarget target) {
  KeywordFilter f;
  f.name = std::move(name);
  f.target = target;
  for (const auto& term : terms) {
    std::string t = to_lower_ascii(trim(term));
    if (t.empty()) continue;
    std::vector<std::string> phrase = tokenize(t);
    if (phrase.empty()) continue;
    f.terms.push_back(std::move(t));
    f.phrases.push_back(std::move(phrase));
  }
  if (f.terms.empty()) throw DataError("filter '" + f.name + "': no terms");
  return f;
}

KeywordFilter load_filter(const std::string& path, FilterTarget target) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open filter file: " + path);
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view v = trim(line);
    if (v.empty() || v.front() == '#') continue;
    terms.emplace_back(v);
  }
  std::string name = std::filesystem::path(path).stem().string();
  return make_filter(std::move(name), terms, target);
}

bool filter_matches_tokens(const KeywordFilter& f, const std::vector<std::string>& tokens) {
  for (const auto& phrase : f.phrases) {
    if (phrase.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
      bool all = true;
      for (std::size_t k = 0; k < phrase.size(); ++k) {
        if (tokens[i + k] != phrase[k]) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
  }
  return false;
}

bool filter_matches_hashtags(const KeywordFilter& f, const std::vector<std::string>& hashtags) {
  for (const auto& term : f.terms)
    if (std::find(hashtags.begin(), hashtags.end(), term) != hashtags.end()) return true;
  return false;
}

bool apply_filter(const KeywordFilter& f, std::string_view text) {
  return filter_matches_tokens(f, tokenize(text));
}

NBLabel nb_label_from_string(std::string_view s) {
  if (s == "food") return NBLabel::food;
  if (s == "not_food") return NBLabel::not_food;
  throw DataError("unknown NB label: '" + std::string(s) + "'");
}

std::string to_string(NBLabel l) { return l == NBLabel::food ? "food" : "not_food"; }

NBModel nb_train(const std::vector<NBExample>& examples, double alpha) {
  if (alpha <= 0.0) throw ConfigError("nb_train: alpha must be > 0");
  std::size_t n_food = 0, n_not = 0;
  std::unordered_map<std::string, std::pair<std::int64_t, std::int64_t>> counts;
  std::int64_t total_food = 0, total_not = 0;
  for (const auto& [tokens, label] : examples) {
    bool is_food = label == NBLabel::food;
    (is_food ? n_food : n_not)++;
    for (const auto& tok : tokens) {
      auto& c = counts[tok];
      if (is_food) {
        ++c.first;
        ++total_food;
      } else {
        ++c.second;
        ++total_not;
      }
    }
  }
  if (n_food == 0 || n_not == 0) throw DataError("nb_train: both labels must be present");

  NBModel m;
  m.alpha = alpha;
  double n_total = static_cast<double>(n_food + n_not);
  m.log_prior_food = std::log(static_cast<double>(n_food) / n_total);
  m.log_prior_not = std::log(static_cast<double>(n_not) / n_total);
  m.vocabulary_size = counts.size();
  double denom_food = static_cast<double>(total_food) + alpha * static_cast<double>(counts.size() + 1);
  double denom_not = static_cast<double>(total_not) + alpha * static_cast<double>(counts.size() + 1);
  m.log_lik.reserve(counts.size());
  for (const auto& [tok, c] : counts) {
    m.log_lik.emplace(tok, std::pair<double, double>(
                               std::log((static_cast<double>(c.first) + alpha) / denom_food),
                               std::log((static_cast<double>(c.second) + alpha) / denom_not)));
  }
  // Out-of-vocabulary tokens carry the same smoothed mass in both classes,
  // so they cancel in the argmax and all-unseen input falls back to priors.
  double denom_pooled = static_cast<double>(total_food + total_not) +
                        alpha * static_cast<double>(counts.size() + 1);
  m.log_unknown_food = std::log(alpha / denom_pooled);
  m.log_unknown_not = m.log_unknown_food;
  return m;
}

NBModel nb_train_csv(const std::string& path, double alpha) {
  CsvTable table = read_csv(path);
  std::size_t c_text = table.col("text");
  std::size_t c_label = table.col("label");
  std::vector<NBExample> examples;
  examples.reserve(table.rows.size());
  for (const auto& row : table.rows)
    examples.emplace_back(tokenize(row[c_text]), nb_label_from_string(trim(row[c_label])));
  return nb_train(examples, alpha);
}

NBDecision nb_classify(const NBModel& m, const std::vector<std::string>& tokens) {
  double score_food = m.log_prior_food;
  double score_not = m.log_prior_not;
  for (const auto& tok : tokens) {
    auto it = m.log_lik.find(tok);
    if (it == m.log_lik.end()) {
      score_food += m.log_unknown_food;
      score_not += m.log_unknown_not;
    } else {
      score_food += it->second.first;
      score_not += it->second.second;
    }
  }
  NBDecision d;
  d.label = score_food > score_not ? NBLabel::food : NBLabel::not_food;
  double lo = std::min(score_food, score_not), hi = std::max(score_food, score_not);
  d.posterior = 1.0 / (1.0 + std::exp(lo - hi));
  return d;
}

}  // namespace foodsig
