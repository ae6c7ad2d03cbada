#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swarmform/geometry.hpp"
#include "swarmform/renderer.hpp"
#include "swarmform/rng.hpp"
#include "swarmform/scoring.hpp"

namespace swarmform {

// Plateau rule: stop once the best score improved by less than `delta` over
// the last `patience` iterations.
struct EarlyStop {
  bool enabled = false;
  double delta = 1e-4;
  std::size_t patience = 10;

  friend bool operator==(const EarlyStop&, const EarlyStop&) = default;
};

// Default population: 40 + 22*40 + 5*40 + 250 + 230 = 1600.
struct RunConfig {
  std::size_t m = 70;   // robots per formation
  std::size_t it = 50;  // iterations
  std::size_t b = 40;   // elites kept each iteration
  std::size_t k = 250;  // score-proportional resamples
  std::size_t h = 5;    // interior perturbations per elite
  std::size_t r = 230;  // fresh random formations per iteration
  std::size_t a = 22;   // alterations per elite (a-1 single-robot jitters + 1 contour projection)
  double lim = 2.0;     // perturbation half-range, meters
  Rect workspace{0.0, 0.0, 40.0, 40.0};
  std::uint64_t seed = 0;
  CanvasSpec canvas;
  ScorerSpec scorer;  // scorer.prompt is the run's prompt
  EarlyStop early_stop;
  unsigned threads = 0;  // render workers; 0 = hardware concurrency

  // b + a*b + h*b + k + r
  std::size_t population_size() const;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

enum class Provenance {
  elite,
  altered_elite,
  interior_perturbed,
  resampled_perturbed,
  fresh_random,
  predefined,
};

std::string_view to_string(Provenance p);

struct Member {
  Formation formation;
  Provenance provenance = Provenance::fresh_random;
};

struct Population {
  std::vector<Member> members;
  std::size_t generation = 0;

  std::size_t size() const { return members.size(); }
  std::size_t count(Provenance p) const;
  std::vector<Formation> formations() const;
};

struct Selection {
  std::vector<std::size_t> elites;  // member indices, best first
  std::size_t champion = 0;
};

struct RunResult {
  Formation best_formation;
  Score best_score = 0.0;
  std::vector<Score> curve;            // best score of each scored iteration
  std::vector<Formation> snapshots;    // that iteration's champion
  bool complete = true;
  bool stopped_early = false;
  std::string error;  // set when !complete
};

// Called before each scoring step and after each iteration. Both optional.
struct RunHooks {
  std::function<void(const Population&)> before_scoring;
  std::function<void(std::size_t iteration, const Formation& champion, Score score)> after_iteration;
};

Formation random_formation(std::size_t m, const Rect& workspace, Rng& rng);

// n uniform formations, the first ones replaced by the predefined shapes and
// jittered copies of them.
Population init_population(const RunConfig& cfg, Rng& rng);

// Number of leading members init_population replaces with predefined shapes.
std::size_t predefined_count(std::size_t n);

// Top-b by score, ties to the lower index.
Selection select_best(std::span<const Score> scores, std::size_t b);

// k draws with replacement, P(i) = w_i / sum(w). All-zero weights draw
// uniformly with a warning; negative or non-finite weights throw.
std::vector<std::size_t> weighted_indices(std::span<const double> weights, std::size_t k, Rng& rng);

// weighted_indices with w_i = score_i - min(scores) + 1e-6.
std::vector<std::size_t> resample_indices(std::span<const Score> scores, std::size_t k, Rng& rng);
std::vector<Formation> resample_proportional(const Population& pop, std::span<const Score> scores,
                                             std::size_t k, Rng& rng);

// Per elite: a-1 copies with one random robot jittered, then the contour
// projection. Returns a * elites.size() formations grouped by elite.
std::vector<Formation> alter_best(std::span<const Formation> elites, std::size_t a, double lim, Rng& rng);

// Per elite: h copies with every interior robot jittered; hull robots untouched.
std::vector<Formation> perturb_interior(std::span<const Formation> elites, std::size_t h, double lim,
                                        Rng& rng);

// Every robot of every formation jittered.
std::vector<Formation> perturb_all(std::span<const Formation> formations, double lim, Rng& rng);

// The full loop. Scorer failures end the run with complete == false and
// whatever iterations finished kept in the result.
RunResult run(const RunConfig& cfg, Scorer& scorer, const RunHooks& hooks = {});

}  // namespace swarmform
