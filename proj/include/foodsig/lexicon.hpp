#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace foodsig {

enum class FoodClass { solid, beverage, alcoholic };

FoodClass food_class_from_string(std::string_view s);
std::string to_string(FoodClass c);

// Scope of a caloric average: everything, or one food class.
enum class ClassFilter { all, solid, beverage, alcoholic };

ClassFilter class_filter_from_string(std::string_view s);
std::string to_string(ClassFilter f);

struct FoodEntry {
  std::string surface;  // lowercase, 1..max_tokens tokens
  std::vector<std::string> tokens;
  double calories = 0.0;  // kcal per serving
  FoodClass cls = FoodClass::solid;
};

// Immutable after load; lookups are by space-joined token sequences.
class FoodLexicon {
 public:
  static FoodLexicon from_entries(std::vector<FoodEntry> entries, int max_tokens = 4);
  // CSV schema: surface,calories,class  (class in {solid,beverage,alcoholic})
  static FoodLexicon load_csv(const std::string& path, int max_tokens = 4);

  const std::vector<FoodEntry>& entries() const { return entries_; }
  const FoodEntry* find(std::string_view joined_tokens) const;
  int max_tokens() const { return max_tokens_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<FoodEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  int max_tokens_ = 4;
};

struct FoodMatch {
  const FoodEntry* entry = nullptr;
  std::size_t token_offset = 0;  // first matched token
  std::size_t token_count = 0;
};

struct MatchResult {
  std::string tweet_id;
  std::vector<FoodMatch> matches;           // non-overlapping, offsets increasing
  std::optional<double> avg_calories;       // mean kcal; present iff >= 1 match
};

// Lowercases, splits on whitespace, strips leading/trailing ASCII punctuation
// per token, drops empties. #tag and @user tokens keep their marker.
std::vector<std::string> tokenize(std::string_view text);

// Leftmost-longest greedy scan over the tokenized text.
MatchResult match_foods(std::string_view text, const FoodLexicon& lex);
MatchResult match_tokens(const std::vector<std::string>& tokens, const FoodLexicon& lex);

// Mean kcal over matched entries, optionally restricted to one class.
// Empty selection gives nullopt.
std::optional<double> tweet_avg_calories(const MatchResult& m, ClassFilter filter = ClassFilter::all);

// Mean kcal over the first min(cap, n) nutrition entries, in given order.
double estimate_calories(const std::vector<std::pair<std::string, double>>& nutrition_entries,
                         int cap = 25);

struct TermScore {
  std::string term;
  double score;  // p(term | region) - p(term | global)
};

using TermCounts = std::unordered_map<std::string, std::int64_t>;

// Probability-difference score over the region's top_k most frequent foods.
// Descending score, ties alphabetical. Region with zero mentions -> empty.
std::vector<TermScore> distinguishing_terms(const TermCounts& region_counts,
                                            const TermCounts& global_counts, int top_k = 200);

}  // namespace foodsig
