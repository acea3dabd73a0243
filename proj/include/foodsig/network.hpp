#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "foodsig/corpus.hpp"
#include "foodsig/stats.hpp"

namespace foodsig {

enum class GraphKind { friendship, mention };

// Immutable after build. Nodes are the gender-known corpus users; friend
// sets keep the full (up to 5,000) follow lists as interned account ids.
struct SocialGraph {
  GraphKind kind = GraphKind::friendship;
  std::vector<std::string> node_ids;  // sorted
  std::unordered_map<std::string, std::size_t> node_index;
  // friendship: unordered pairs stored with first < second; mention: (from, to)
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::vector<std::uint32_t>> friend_sets;  // sorted interned ids
  std::vector<std::vector<std::size_t>> adjacency;      // undirected view, sorted unique

  std::size_t node_count() const { return node_ids.size(); }
  std::size_t edge_count() const { return edges.size(); }
};

// Undirected edge (a, b) iff a and b follow each other.
SocialGraph build_friendship(const std::vector<UserProfile>& profiles);

// Directed edge a -> b iff a mentions b in at least one kept tweet.
SocialGraph build_mention(const std::vector<TweetRecord>& tweets,
                          const std::vector<UserProfile>& profiles,
                          bool exclude_replies_retweets = false);

// Pre-built graph input: edges CSV (src,dst) and an optional friend-set CSV
// (user_id,friend_id; one row per followed account). Friendship edges are
// symmetrized and deduplicated; self-edges are a DataError.
SocialGraph load_graph_csv(const std::string& edges_path, const std::string& friend_sets_path,
                           GraphKind kind);

double jaccard(const std::unordered_set<std::string>& a, const std::unordered_set<std::string>& b);
double jaccard_sorted(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

struct ActivationPoint {
  std::size_t x = 0;         // number of active neighbours
  std::size_t n = 0;         // users with exactly x active neighbours
  std::size_t n_active = 0;  // of those, themselves active
  double p = 0.0;            // n_active / n (0 when n == 0)
  double se = 0.0;           // sqrt(p (1-p) / n)
};

struct ActivationCurve {
  std::vector<ActivationPoint> points;  // x = 0..max, contiguous
  double threshold = 0.0;               // nearest-rank percentile of scores
  std::size_t n_active_total = 0;
};

struct ActivationOptions {
  double percentile = 90.0;
  bool drop_same_state = false;
  bool drop_replies_retweets = false;  // recorded; applied at mention build
  const std::unordered_map<std::string, std::string>* user_state = nullptr;
};

// Active = score strictly above the nearest-rank percentile threshold.
std::vector<bool> active_flags(const SocialGraph& g,
                               const std::unordered_map<std::string, double>& scores,
                               double percentile, double* threshold_out = nullptr);

// Per-node count of active neighbours after the ablation filters.
std::vector<std::size_t> active_neighbor_counts(const SocialGraph& g,
                                                const std::vector<bool>& active,
                                                const ActivationOptions& options = {});

ActivationCurve activation_from_flags(const SocialGraph& g, const std::vector<bool>& active,
                                      const ActivationOptions& options = {});

ActivationCurve activation_analysis(const SocialGraph& g,
                                    const std::unordered_map<std::string, double>& scores,
                                    const ActivationOptions& options = {});

struct JaccardBin {
  double lo = 0.0, hi = 1.0;
  std::size_t n_links = 0;
  bool defined = false;  // at least 3 links and a nondegenerate correlation
  double r = 0.0;
  BootstrapCI ci;
};

struct JaccardBinReport {
  std::vector<JaccardBin> bins;
  std::size_t total_links = 0;
};

struct CliquenessOptions {
  std::vector<double> bin_edges = {0.0, 0.0125, 0.025, 0.05, 0.1, 0.2, 1.0};
  int bootstrap_iters = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
};

// Links bucketed by Jaccard similarity of the endpoints' full friend sets;
// per bin, Pearson of endpoint food-tweet fractions (both orientations for
// undirected links) with a bootstrap CI over links.
JaccardBinReport cliqueness_analysis(const SocialGraph& g,
                                     const std::unordered_map<std::string, double>& food_fraction,
                                     const CliquenessOptions& options = {});

}  // namespace foodsig
