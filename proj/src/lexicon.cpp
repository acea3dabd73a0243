#include "foodsig/lexicon.hpp"

#include <algorithm>
#include <cmath>

#include "foodsig/csv.hpp"
#include "foodsig/error.hpp"
#include "foodsig/strutil.hpp"

namespace foodsig {

FoodClass food_class_from_string(std::string_view s) {
  if (s == "solid") return FoodClass::solid;
  if (s == "beverage") return FoodClass::beverage;
  if (s == "alcoholic") return FoodClass::alcoholic;
  throw DataError("unknown food class: '" + std::string(s) + "'");
}

std::string to_string(FoodClass c) {
  switch (c) {
    case FoodClass::solid: return "solid";
    case FoodClass::beverage: return "beverage";
    case FoodClass::alcoholic: return "alcoholic";
  }
  return "solid";
}

ClassFilter class_filter_from_string(std::string_view s) {
  if (s == "all") return ClassFilter::all;
  if (s == "solid") return ClassFilter::solid;
  if (s == "beverage") return ClassFilter::beverage;
  if (s == "alcoholic") return ClassFilter::alcoholic;
  throw ConfigError("unknown class filter: '" + std::string(s) + "'");
}

std::string to_string(ClassFilter f) {
  switch (f) {
    case ClassFilter::all: return "all";
    case ClassFilter::solid: return "solid";
    case ClassFilter::beverage: return "beverage";
    case ClassFilter::alcoholic: return "alcoholic";
  }
  return "all";
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_ascii_space(text[i])) ++i;
    if (i == start) break;
    std::string tok = to_lower_ascii(text.substr(start, i - start));
    std::string_view v = tok;
    std::string marker;
    if ((v.front() == '#' || v.front() == '@') && v.size() > 1) {
      marker = v.front();
      v.remove_prefix(1);
    }
    while (!v.empty() && is_ascii_punct(v.front())) v.remove_prefix(1);
    while (!v.empty() && is_ascii_punct(v.back())) v.remove_suffix(1);
    if (!v.empty()) tokens.push_back(marker + std::string(v));
  }
  return tokens;
}

FoodLexicon FoodLexicon::from_entries(std::vector<FoodEntry> entries, int max_tokens) {
  if (max_tokens < 1) throw ConfigError("lexicon: max_tokens must be >= 1");
  FoodLexicon lex;
  lex.max_tokens_ = max_tokens;
  lex.entries_ = std::move(entries);
  for (std::size_t i = 0; i < lex.entries_.size(); ++i) {
    FoodEntry& e = lex.entries_[i];
    if (e.surface.empty()) throw DataError("lexicon: empty surface");
    if (e.tokens.empty()) e.tokens = tokenize(e.surface);
    if (e.tokens.empty() || static_cast<int>(e.tokens.size()) > max_tokens)
      throw DataError("lexicon: surface '" + e.surface + "' has " +
                      std::to_string(e.tokens.size()) + " tokens (limit " +
                      std::to_string(max_tokens) + ")");
    if (!(e.calories >= 0.0) || !std::isfinite(e.calories))
      throw DataError("lexicon: bad calories for '" + e.surface + "'");
    std::string key = join(e.tokens, " ");
    if (!lex.index_.emplace(std::move(key), i).second)
      throw DataError("lexicon: duplicate surface '" + e.surface + "'");
  }
  return lex;
}

FoodLexicon FoodLexicon::load_csv(const std::string& path, int max_tokens) {
  CsvTable table = read_csv(path);
  std::size_t c_surface = table.col("surface");
  std::size_t c_cal = table.col("calories");
  std::size_t c_class = table.col("class");
  std::vector<FoodEntry> entries;
  entries.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    FoodEntry e;
    e.surface = to_lower_ascii(trim(row[c_surface]));
    try {
      e.calories = std::stod(row[c_cal]);
    } catch (const std::exception&) {
      throw DataError(path + ": bad calories value '" + row[c_cal] + "'");
    }
    e.cls = food_class_from_string(trim(row[c_class]));
    entries.push_back(std::move(e));
  }
  return from_entries(std::move(entries), max_tokens);
}

const FoodEntry* FoodLexicon::find(std::string_view joined_tokens) const {
  auto it = index_.find(std::string(joined_tokens));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

MatchResult match_tokens(const std::vector<std::string>& tokens, const FoodLexicon& lex) {
  if (lex.empty()) throw DataError("match_foods: empty lexicon");
  MatchResult result;
  std::size_t n = tokens.size();
  std::size_t pos = 0;
  std::string key;
  while (pos < n) {
    std::size_t limit = std::min<std::size_t>(static_cast<std::size_t>(lex.max_tokens()), n - pos);
    const FoodEntry* hit = nullptr;
    std::size_t hit_len = 0;
    for (std::size_t len = limit; len >= 1; --len) {
      key.clear();
      for (std::size_t k = 0; k < len; ++k) {
        if (k) key += ' ';
        key += tokens[pos + k];
      }
      if (const FoodEntry* e = lex.find(key)) {
        hit = e;
        hit_len = len;
        break;
      }
    }
    if (hit) {
      result.matches.push_back({hit, pos, hit_len});
      pos += hit_len;
    } else {
      ++pos;
    }
  }
  if (!result.matches.empty()) {
    double sum = 0.0;
    for (const auto& m : result.matches) sum += m.entry->calories;
    result.avg_calories = sum / static_cast<double>(result.matches.size());
  }
  return result;
}

MatchResult match_foods(std::string_view text, const FoodLexicon& lex) {
  return match_tokens(tokenize(text), lex);
}

std::optional<double> tweet_avg_calories(const MatchResult& m, ClassFilter filter) {
  double sum = 0.0;
  int n = 0;
  for (const auto& match : m.matches) {
    if (filter != ClassFilter::all) {
      FoodClass want = filter == ClassFilter::solid      ? FoodClass::solid
                       : filter == ClassFilter::beverage ? FoodClass::beverage
                                                         : FoodClass::alcoholic;
      if (match.entry->cls != want) continue;
    }
    sum += match.entry->calories;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

double estimate_calories(const std::vector<std::pair<std::string, double>>& nutrition_entries,
                         int cap) {
  if (nutrition_entries.empty()) throw DataError("no nutrition entries");
  if (cap < 1) throw ConfigError("estimate_calories: cap must be >= 1");
  std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(cap), nutrition_entries.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) {
    double kcal = nutrition_entries[i].second;
    if (!(kcal >= 0.0) || !std::isfinite(kcal))
      throw DataError("estimate_calories: negative or non-finite kcal for '" +
                      nutrition_entries[i].first + "'");
    sum += kcal;
  }
  return sum / static_cast<double>(take);
}

std::vector<TermScore> distinguishing_terms(const TermCounts& region_counts,
                                            const TermCounts& global_counts, int top_k) {
  if (top_k < 1) throw ConfigError("distinguishing_terms: top_k must be >= 1");
  std::int64_t region_total = 0, global_total = 0;
  for (const auto& [term, c] : region_counts) {
    if (c < 0) throw DataError("distinguishing_terms: negative count for '" + term + "'");
    region_total += c;
  }
  for (const auto& [term, c] : global_counts) {
    if (c < 0) throw DataError("distinguishing_terms: negative count for '" + term + "'");
    global_total += c;
  }
  if (global_total <= 0) throw DataError("distinguishing_terms: empty global counts");
  if (region_total == 0) return {};

  // Region's top_k most frequent foods; count desc, ties alphabetical.
  std::vector<std::pair<std::string, std::int64_t>> by_count(region_counts.begin(),
                                                             region_counts.end());
  std::sort(by_count.begin(), by_count.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (by_count.size() > static_cast<std::size_t>(top_k)) by_count.resize(static_cast<std::size_t>(top_k));

  std::vector<TermScore> scores;
  scores.reserve(by_count.size());
  for (const auto& [term, c] : by_count) {
    auto git = global_counts.find(term);
    double pg = git == global_counts.end()
                    ? 0.0
                    : static_cast<double>(git->second) / static_cast<double>(global_total);
    double pr = static_cast<double>(c) / static_cast<double>(region_total);
    scores.push_back({term, pr - pg});
  }
  std::sort(scores.begin(), scores.end(), [](const TermScore& a, const TermScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });
  return scores;
}

}  // namespace foodsig
