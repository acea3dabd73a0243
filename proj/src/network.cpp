#include "foodsig/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>

#include "foodsig/csv.hpp"
#include "foodsig/error.hpp"
#include "foodsig/parallel.hpp"
#include "foodsig/rng.hpp"

namespace foodsig {

namespace {

// Gender-known users only; node ids sorted for reproducible indices.
std::vector<const UserProfile*> graph_population(const std::vector<UserProfile>& profiles) {
  std::vector<const UserProfile*> keep;
  for (const auto& p : profiles)
    if (p.gender != Gender::none) keep.push_back(&p);
  std::sort(keep.begin(), keep.end(),
            [](const UserProfile* a, const UserProfile* b) { return a->user_id < b->user_id; });
  return keep;
}

void init_nodes(SocialGraph& g, const std::vector<const UserProfile*>& users) {
  g.node_ids.reserve(users.size());
  for (const auto* p : users) g.node_ids.push_back(p->user_id);
  for (std::size_t i = 0; i < g.node_ids.size(); ++i) g.node_index.emplace(g.node_ids[i], i);
}

// Interns every account id appearing in any friend list so Jaccard runs on
// sorted integer vectors.
void build_friend_sets(SocialGraph& g, const std::vector<const UserProfile*>& users) {
  std::unordered_map<std::string, std::uint32_t> intern;
  auto intern_id = [&intern](const std::string& s) {
    auto [it, inserted] = intern.emplace(s, static_cast<std::uint32_t>(intern.size()));
    return it->second;
  };
  // Deterministic intern order: sorted union of all ids.
  std::vector<std::string> all;
  for (const auto* p : users) {
    for (const auto& f : p->friend_ids) all.push_back(f);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  for (const auto& s : all) intern_id(s);
  g.friend_sets.resize(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    auto& set = g.friend_sets[i];
    set.reserve(users[i]->friend_ids.size());
    for (const auto& f : users[i]->friend_ids) set.push_back(intern.at(f));
    std::sort(set.begin(), set.end());
  }
}

void build_adjacency(SocialGraph& g) {
  g.adjacency.assign(g.node_count(), {});
  for (const auto& [a, b] : g.edges) {
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
  }
  for (auto& nbrs : g.adjacency) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
}

}  // namespace

SocialGraph build_friendship(const std::vector<UserProfile>& profiles) {
  SocialGraph g;
  g.kind = GraphKind::friendship;
  auto users = graph_population(profiles);
  init_nodes(g, users);
  build_friend_sets(g, users);
  for (std::size_t i = 0; i < users.size(); ++i) {
    for (const auto& fid : users[i]->friend_ids) {
      auto it = g.node_index.find(fid);
      if (it == g.node_index.end()) continue;
      std::size_t j = it->second;
      if (j <= i) continue;  // emit each unordered pair once, no self-edges
      if (users[j]->friend_ids.contains(users[i]->user_id)) g.edges.emplace_back(i, j);
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  build_adjacency(g);
  return g;
}

SocialGraph build_mention(const std::vector<TweetRecord>& tweets,
                          const std::vector<UserProfile>& profiles,
                          bool exclude_replies_retweets) {
  SocialGraph g;
  g.kind = GraphKind::mention;
  auto users = graph_population(profiles);
  init_nodes(g, users);
  build_friend_sets(g, users);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& t : tweets) {
    if (exclude_replies_retweets && (t.is_reply || t.is_retweet)) continue;
    auto from = g.node_index.find(t.user_id);
    if (from == g.node_index.end()) continue;
    for (const auto& m : t.mentions) {
      auto to = g.node_index.find(m);
      if (to == g.node_index.end()) continue;
      if (to->second == from->second) continue;
      seen.emplace(from->second, to->second);
    }
  }
  g.edges.assign(seen.begin(), seen.end());
  build_adjacency(g);
  return g;
}

SocialGraph load_graph_csv(const std::string& edges_path, const std::string& friend_sets_path,
                           GraphKind kind) {
  SocialGraph g;
  g.kind = kind;
  CsvTable edges = read_csv(edges_path);
  std::size_t c_src = edges.col("src"), c_dst = edges.col("dst");

  std::map<std::string, std::vector<std::string>> friends;
  if (!friend_sets_path.empty()) {
    CsvTable fs = read_csv(friend_sets_path);
    std::size_t c_user = fs.col("user_id"), c_friend = fs.col("friend_id");
    for (const auto& row : fs.rows) friends[row[c_user]].push_back(row[c_friend]);
  }

  std::set<std::string> nodes;
  for (const auto& row : edges.rows) {
    if (row[c_src] == row[c_dst])
      throw DataError(edges_path + ": self-edge on '" + row[c_src] + "'");
    nodes.insert(row[c_src]);
    nodes.insert(row[c_dst]);
  }
  for (const auto& [user, list] : friends) nodes.insert(user);
  g.node_ids.assign(nodes.begin(), nodes.end());
  for (std::size_t i = 0; i < g.node_ids.size(); ++i) g.node_index.emplace(g.node_ids[i], i);

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& row : edges.rows) {
    std::size_t a = g.node_index.at(row[c_src]);
    std::size_t b = g.node_index.at(row[c_dst]);
    if (kind == GraphKind::friendship && a > b) std::swap(a, b);
    seen.emplace(a, b);
  }
  g.edges.assign(seen.begin(), seen.end());

  std::unordered_map<std::string, std::uint32_t> intern;
  std::set<std::string> all_friend_ids;
  for (const auto& [user, list] : friends)
    for (const auto& f : list) all_friend_ids.insert(f);
  for (const auto& f : all_friend_ids)
    intern.emplace(f, static_cast<std::uint32_t>(intern.size()));
  g.friend_sets.assign(g.node_count(), {});
  for (const auto& [user, list] : friends) {
    auto& set = g.friend_sets[g.node_index.at(user)];
    for (const auto& f : list) set.push_back(intern.at(f));
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
  }
  build_adjacency(g);
  return g;
}

double jaccard_sorted(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t i = 0, j = 0, both = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++both;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  std::size_t uni = a.size() + b.size() - both;
  return static_cast<double>(both) / static_cast<double>(uni);
}

double jaccard(const std::unordered_set<std::string>& a, const std::unordered_set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t both = 0;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& s : small)
    if (large.contains(s)) ++both;
  return static_cast<double>(both) / static_cast<double>(a.size() + b.size() - both);
}

std::vector<bool> active_flags(const SocialGraph& g,
                               const std::unordered_map<std::string, double>& scores,
                               double percentile, double* threshold_out) {
  if (g.node_count() == 0) {
    if (threshold_out) *threshold_out = 0.0;
    return {};
  }
  std::vector<double> values;
  values.reserve(g.node_count());
  for (const auto& id : g.node_ids) {
    auto it = scores.find(id);
    if (it == scores.end()) throw DataError("activation: no score for user '" + id + "'");
    values.push_back(it->second);
  }
  double threshold = percentile_nearest_rank(values, percentile);
  if (threshold_out) *threshold_out = threshold;
  std::vector<bool> active(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) active[i] = values[i] > threshold;
  return active;
}

std::vector<std::size_t> active_neighbor_counts(const SocialGraph& g,
                                                const std::vector<bool>& active,
                                                const ActivationOptions& options) {
  if (active.size() != g.node_count()) throw DataError("activation: flag count mismatch");
  std::vector<const std::string*> state_of(g.node_count(), nullptr);
  if (options.drop_same_state) {
    if (!options.user_state)
      throw ConfigError("activation: drop_same_state needs a user->state mapping");
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      auto it = options.user_state->find(g.node_ids[i]);
      if (it == options.user_state->end())
        throw DataError("activation: no state for user '" + g.node_ids[i] + "'");
      state_of[i] = &it->second;
    }
  }
  std::vector<std::size_t> counts(g.node_count(), 0);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    std::size_t x = 0;
    for (std::size_t j : g.adjacency[i]) {
      if (options.drop_same_state && *state_of[i] == *state_of[j]) continue;
      if (active[j]) ++x;
    }
    counts[i] = x;
  }
  return counts;
}

ActivationCurve activation_from_flags(const SocialGraph& g, const std::vector<bool>& active,
                                      const ActivationOptions& options) {
  ActivationCurve curve;
  if (g.node_count() == 0) return curve;
  std::vector<std::size_t> counts = active_neighbor_counts(g, active, options);
  std::size_t max_x = *std::max_element(counts.begin(), counts.end());
  curve.points.resize(max_x + 1);
  for (std::size_t x = 0; x <= max_x; ++x) curve.points[x].x = x;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    auto& pt = curve.points[counts[i]];
    pt.n++;
    if (active[i]) {
      pt.n_active++;
      curve.n_active_total++;
    }
  }
  for (auto& pt : curve.points) {
    if (pt.n == 0) continue;
    pt.p = static_cast<double>(pt.n_active) / static_cast<double>(pt.n);
    pt.se = std::sqrt(pt.p * (1.0 - pt.p) / static_cast<double>(pt.n));
  }
  return curve;
}

ActivationCurve activation_analysis(const SocialGraph& g,
                                    const std::unordered_map<std::string, double>& scores,
                                    const ActivationOptions& options) {
  double threshold = 0.0;
  std::vector<bool> active = active_flags(g, scores, options.percentile, &threshold);
  ActivationCurve curve = activation_from_flags(g, active, options);
  curve.threshold = threshold;
  return curve;
}

JaccardBinReport cliqueness_analysis(const SocialGraph& g,
                                     const std::unordered_map<std::string, double>& food_fraction,
                                     const CliquenessOptions& options) {
  const auto& edges_cfg = options.bin_edges;
  if (edges_cfg.size() < 2 || edges_cfg.front() != 0.0 || edges_cfg.back() != 1.0 ||
      !std::is_sorted(edges_cfg.begin(), edges_cfg.end()))
    throw ConfigError("cliqueness: bin edges must rise from 0 to 1");
  for (std::size_t i = 1; i < edges_cfg.size(); ++i)
    if (edges_cfg[i] == edges_cfg[i - 1]) throw ConfigError("cliqueness: duplicate bin edge");

  std::vector<double> fraction(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    auto it = food_fraction.find(g.node_ids[i]);
    if (it == food_fraction.end())
      throw DataError("cliqueness: no food fraction for user '" + g.node_ids[i] + "'");
    fraction[i] = it->second;
  }

  const std::size_t n_bins = edges_cfg.size() - 1;
  JaccardBinReport report;
  report.total_links = g.edge_count();
  report.bins.resize(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    report.bins[b].lo = edges_cfg[b];
    report.bins[b].hi = edges_cfg[b + 1];
  }

  // Half-open bins, last bin closed at 1.
  std::vector<double> strength(g.edge_count());
  parallel_for(g.edge_count(), options.workers, [&](std::size_t e) {
    strength[e] = jaccard_sorted(g.friend_sets[g.edges[e].first], g.friend_sets[g.edges[e].second]);
  });
  std::vector<std::vector<std::size_t>> links_in_bin(n_bins);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    double s = strength[e];
    std::size_t b = n_bins - 1;
    for (std::size_t i = 0; i < n_bins; ++i) {
      if (s < edges_cfg[i + 1] || (i == n_bins - 1)) {
        b = i;
        break;
      }
    }
    links_in_bin[b].push_back(e);
  }

  const bool undirected = g.kind == GraphKind::friendship;
  auto pair_pearson = [&](const std::vector<std::size_t>& links) {
    std::size_t n_pairs = links.size() * (undirected ? 2 : 1);
    Eigen::VectorXd x(static_cast<Eigen::Index>(n_pairs)), y(static_cast<Eigen::Index>(n_pairs));
    Eigen::Index k = 0;
    for (std::size_t e : links) {
      auto [u, v] = g.edges[e];
      x[k] = fraction[u];
      y[k] = fraction[v];
      ++k;
      if (undirected) {
        x[k] = fraction[v];
        y[k] = fraction[u];
        ++k;
      }
    }
    return pearson(x, y);
  };

  for (std::size_t b = 0; b < n_bins; ++b) {
    auto& bin = report.bins[b];
    const auto& links = links_in_bin[b];
    bin.n_links = links.size();
    if (links.size() < 3) continue;  // undefined, reported as such
    try {
      bin.r = pair_pearson(links);
    } catch (const DataError&) {
      continue;  // degenerate fractions in this bin
    }
    bin.defined = true;

    // Bootstrap over links (keeps both orientations of a resampled link).
    std::vector<double> draws(static_cast<std::size_t>(options.bootstrap_iters));
    std::uint64_t bin_seed = derive_seed(options.seed, stream_label("cliqueness"),
                                         static_cast<std::uint64_t>(b));
    std::atomic<int> redraws{0};
    parallel_for(draws.size(), options.workers, [&](std::size_t it) {
      std::vector<std::size_t> resampled(links.size());
      for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt >= 1000)
          throw DataError("cliqueness: bootstrap failed on 1000 consecutive resamples");
        Rng rng(derive_seed(bin_seed, static_cast<std::uint64_t>(it), attempt));
        for (std::size_t i = 0; i < links.size(); ++i)
          resampled[i] = links[rng.below(links.size())];
        try {
          draws[it] = pair_pearson(resampled);
          break;
        } catch (const DataError&) {
          ++redraws;
        }
      }
    });
    bin.ci.iterations = options.bootstrap_iters;
    bin.ci.seed = bin_seed;
    bin.ci.point = bin.r;
    bin.ci.redraws = redraws;
    bin.ci.lo = percentile_nearest_rank(draws, 2.5);
    bin.ci.hi = percentile_nearest_rank(std::move(draws), 97.5);
    bin.ci.degenerate = !(bin.ci.lo <= bin.r && bin.r <= bin.ci.hi);
  }
  return report;
}

}  // namespace foodsig
