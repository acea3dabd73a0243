#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "foodsig/network.hpp"

namespace foodsig {

// Synthetic nation generator. Works weights-first: county food weights are
// drawn as integer user counts, users are then sampled to match, so pipeline
// aggregates reproduce the planted weights exactly.
struct SynthConfig {
  std::uint64_t seed = 0;
  int n_states = 51;
  int counties_per_state = 6;
  int users_per_county = 100;
  int tweets_per_user_min = 8;   // uniform tweets-per-user distribution
  int tweets_per_user_max = 16;
  std::string lexicon_path;

  // Planted county model: outcome = intercept + sum(beta_f * weight_f)
  //                                + demог component + N(0, noise_sigma).
  double outcome_intercept = 27.0;   // obesity; diabetes uses its own
  double diabetes_intercept = 9.5;
  double food_signal_sd = 3.6;       // sd of the beta . w component over counties
  double demog_signal_sd = 1.15;     // sd of the demographic component
  double noise_sigma = 1.55;         // county noise
  double state_noise_sigma = 0.25;   // extra noise on state-level outcomes
  double beta_jitter = 0.35;         // per-food deviation from the calorie gradient
  double diabetes_food_scale = 0.55; // diabetes beta = scale * obesity beta

  double homophily = 0.5;       // h in [0,1]
  double mean_degree = 6.0;
  double urban_fraction = 0.269;
  double gender_none_fraction = 0.10;

  int n_areas = 8;               // prominence areas
  int accounts_per_area = 30;

  std::string outdir;

  void validate() const;
};

struct SynthCountyTruth {
  std::string county;
  std::string state;
  double obesity = 0.0;
  double diabetes = 0.0;
  double food_signal = 0.0;   // sum(beta_f * weight_f), centered
  double demog_signal = 0.0;
  double noise = 0.0;         // obesity noise draw
  double diabetes_noise = 0.0;
  std::map<std::string, double> food_weights;  // exact planted proportions
};

struct SynthTruth {
  std::uint64_t seed = 0;
  std::unordered_map<std::string, std::string> modal_zip;  // user -> home zip
  std::unordered_map<std::string, double> user_risk;       // user -> sum beta over foods
  std::unordered_map<std::string, bool> user_urban;
  double urban_fraction_realized = 0.0;
  std::map<std::string, double> beta;  // food surface -> obesity coefficient
  double beta_intercept = 0.0;         // obesity intercept after centering
  double diabetes_beta_scale = 0.0;
  double diabetes_demog_scale = 0.0;
  double diabetes_beta_intercept = 0.0;
  std::vector<SynthCountyTruth> counties;
  std::size_t friendship_edges = 0;  // between gender-known users only
  std::size_t mention_edges = 0;
  std::size_t n_users = 0;
  std::size_t n_female = 0, n_male = 0, n_none = 0;
  double r2_obesity = 0.0;   // realized var(signal) / var(outcome)
  double r2_diabetes = 0.0;

  std::string to_json() const;
  static SynthTruth from_json(const std::string& text);
};

// Writes tweets.jsonl, profiles.jsonl, census.csv, health.csv,
// zip_county.csv, county_state.csv, metro_zips.csv, name_gender.csv,
// prominence.csv, nb_training.csv, lexicon.csv and truth.json into
// config.outdir. Deterministic per seed.
SynthTruth generate(const SynthConfig& config);

// Planted-homophily graph for threshold-activation tests: node scores are
// latent risks, partners preferentially drawn from a similarity window.
struct PlantedActivationGraph {
  SocialGraph graph;  // friendship kind
  std::unordered_map<std::string, double> scores;
  std::unordered_map<std::string, std::string> user_state;
};

PlantedActivationGraph generate_homophily_graph(std::size_t n_nodes, double homophily,
                                                double mean_degree, std::uint64_t seed,
                                                int n_states = 20);

// Disjoint-pair graph with planted per-bin endpoint correlations and friend
// sets engineered to land in the requested Jaccard bins.
struct PlantedCliquenessGraph {
  SocialGraph graph;
  std::unordered_map<std::string, double> fractions;
  std::vector<double> bin_edges;
  std::vector<double> planted_bin_r;
};

PlantedCliquenessGraph generate_overlap_gradient_graph(
    std::size_t links_per_bin, std::uint64_t seed,
    std::vector<double> planted_bin_r = {0.05, 0.2, 0.35, 0.5, 0.65, 0.8},
    std::vector<double> bin_edges = {0.0, 0.0125, 0.025, 0.05, 0.1, 0.2, 1.0});

}  // namespace foodsig
