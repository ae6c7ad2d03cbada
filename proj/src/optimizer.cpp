#include "swarmform/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "swarmform/parallel.hpp"

namespace swarmform {

namespace {

constexpr double kWeightEpsilon = 1e-6;

void warn(std::string_view message) {
  std::cerr << "warning: " << message << '\n';
}

void jitter(Point2& p, double lim, const Rect& workspace, Rng& rng) {
  p.x += rng.symmetric(lim);
  p.y += rng.symmetric(lim);
  p = workspace.clamp(p);
}

}  // namespace

std::size_t RunConfig::population_size() const {
  return b + a * b + h * b + k + r;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (m < 3) fail("m must be at least 3");
  if (b < 1) fail("b must be at least 1");
  if (it < 1) fail("it must be at least 1");
  if (!(lim > 0.0) || !std::isfinite(lim)) fail("lim must be a positive finite number");
  if (!(workspace.xmax > workspace.xmin) || !(workspace.ymax > workspace.ymin) ||
      !std::isfinite(workspace.xmin) || !std::isfinite(workspace.xmax) ||
      !std::isfinite(workspace.ymin) || !std::isfinite(workspace.ymax)) {
    fail("workspace must be a finite, non-empty rectangle");
  }
  if (early_stop.enabled && early_stop.patience < 1) fail("early_stop_patience must be at least 1");
  if (scorer.parallelism < 1) fail("scorer_parallelism must be at least 1");
  if (scorer.timeout_ms < 1) fail("scorer_timeout_ms must be at least 1");
  canvas.validate();
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::elite: return "elite";
    case Provenance::altered_elite: return "altered_elite";
    case Provenance::interior_perturbed: return "interior_perturbed";
    case Provenance::resampled_perturbed: return "resampled_perturbed";
    case Provenance::fresh_random: return "fresh_random";
    case Provenance::predefined: return "predefined";
  }
  return "unknown";
}

std::size_t Population::count(Provenance p) const {
  return static_cast<std::size_t>(
      std::count_if(members.begin(), members.end(), [p](const Member& mb) { return mb.provenance == p; }));
}

std::vector<Formation> Population::formations() const {
  std::vector<Formation> out;
  out.reserve(members.size());
  for (const Member& mb : members) {
    out.push_back(mb.formation);
  }
  return out;
}

Formation random_formation(std::size_t m, const Rect& workspace, Rng& rng) {
  Formation f;
  f.workspace = workspace;
  f.positions.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = rng.uniform(workspace.xmin, workspace.xmax);
    const double y = rng.uniform(workspace.ymin, workspace.ymax);
    f.positions.push_back({x, y});
  }
  return f;
}

std::size_t predefined_count(std::size_t n) {
  constexpr std::size_t kShapes = std::size(kAllShapes);
  if (n >= 4 * kShapes) {
    // 5 shapes plus j jittered copies each, 5(j + 1) <= n / 4.
    return kShapes * (n / (4 * kShapes));
  }
  if (n >= 2 * kShapes) {
    return kShapes;
  }
  return n / 2;
}

Population init_population(const RunConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.population_size();
  Population pop;
  pop.members.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pop.members.push_back({random_formation(cfg.m, cfg.workspace, rng), Provenance::fresh_random});
  }

  constexpr std::size_t kShapes = std::size(kAllShapes);
  const std::size_t replaced = predefined_count(n);
  if (replaced < kShapes) {
    warn("population of " + std::to_string(n) + " too small for all predefined shapes; seeding " +
         std::to_string(replaced));
  }
  for (std::size_t i = 0; i < replaced; ++i) {
    Formation f = predefined_formation(kAllShapes[i % kShapes], cfg.m, cfg.workspace);
    if (i >= kShapes) {
      for (Point2& p : f.positions) {
        jitter(p, cfg.lim, cfg.workspace, rng);
      }
    }
    pop.members[i] = {std::move(f), Provenance::predefined};
  }
  return pop;
}

Selection select_best(std::span<const Score> scores, std::size_t b) {
  if (b > scores.size()) {
    throw std::invalid_argument("cannot select " + std::to_string(b) + " elites from " +
                                std::to_string(scores.size()) + " members");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(b), order.end(),
                    [&](std::size_t x, std::size_t y) {
                      return scores[x] > scores[y] || (scores[x] == scores[y] && x < y);
                    });
  order.resize(b);
  Selection out;
  out.champion = order.empty() ? 0 : order.front();
  out.elites = std::move(order);
  return out;
}

std::vector<std::size_t> weighted_indices(std::span<const double> weights, std::size_t k, Rng& rng) {
  if (k == 0) {
    return {};
  }
  if (weights.empty()) {
    throw std::invalid_argument("cannot resample from an empty population");
  }
  std::vector<double> cumulative(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("resampling weights must be finite and non-negative");
    }
    total += weights[i];
    cumulative[i] = total;
  }

  std::vector<std::size_t> out;
  out.reserve(k);
  if (!(total > 0.0) || !std::isfinite(total)) {
    warn("resampling weights degenerate; drawing uniformly");
    for (std::size_t i = 0; i < k; ++i) {
      out.push_back(rng.index(weights.size()));
    }
    return out;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double u = rng.uniform01() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    out.push_back(std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                        weights.size() - 1));
  }
  return out;
}

std::vector<std::size_t> resample_indices(std::span<const Score> scores, std::size_t k, Rng& rng) {
  if (k == 0) {
    return {};
  }
  if (scores.empty()) {
    throw std::invalid_argument("cannot resample from an empty population");
  }
  const double lowest = *std::min_element(scores.begin(), scores.end());
  std::vector<double> weights(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    weights[i] = scores[i] - lowest + kWeightEpsilon;
  }
  return weighted_indices(weights, k, rng);
}

std::vector<Formation> resample_proportional(const Population& pop, std::span<const Score> scores,
                                             std::size_t k, Rng& rng) {
  if (scores.size() != pop.size()) {
    throw std::invalid_argument("score count does not match population size");
  }
  std::vector<Formation> out;
  out.reserve(k);
  for (std::size_t idx : resample_indices(scores, k, rng)) {
    out.push_back(pop.members[idx].formation);
  }
  return out;
}

std::vector<Formation> alter_best(std::span<const Formation> elites, std::size_t a, double lim, Rng& rng) {
  std::vector<Formation> out;
  if (a == 0) {
    return out;
  }
  out.reserve(a * elites.size());
  for (const Formation& elite : elites) {
    for (std::size_t v = 0; v + 1 < a; ++v) {
      Formation f = elite;
      jitter(f.positions[rng.index(f.size())], lim, f.workspace, rng);
      out.push_back(std::move(f));
    }
    out.push_back(project_to_contour(elite).formation);
  }
  return out;
}

std::vector<Formation> perturb_interior(std::span<const Formation> elites, std::size_t h, double lim,
                                        Rng& rng) {
  std::vector<Formation> out;
  out.reserve(h * elites.size());
  for (const Formation& elite : elites) {
    if (h == 0) {
      continue;
    }
    const HullPartition parts = partition(elite);
    for (std::size_t v = 0; v < h; ++v) {
      Formation f = elite;
      for (std::size_t idx : parts.interior_indices) {
        jitter(f.positions[idx], lim, f.workspace, rng);
      }
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<Formation> perturb_all(std::span<const Formation> formations, double lim, Rng& rng) {
  std::vector<Formation> out(formations.begin(), formations.end());
  for (Formation& f : out) {
    for (Point2& p : f.positions) {
      jitter(p, lim, f.workspace, rng);
    }
  }
  return out;
}

RunResult run(const RunConfig& cfg, Scorer& scorer, const RunHooks& hooks) {
  cfg.validate();
  const unsigned workers = cfg.threads == 0 ? default_parallelism() : cfg.threads;

  RunResult result;
  {
    Rng rng = Rng::for_stream(cfg.seed, 0, Stream::init);
    Population pop = init_population(cfg, rng);

    for (std::size_t iter = 0; iter < cfg.it; ++iter) {
      pop.generation = iter;
      if (hooks.before_scoring) {
        hooks.before_scoring(pop);
      }

      std::vector<RasterImage> images(pop.size());
      parallel_for(pop.size(), workers, [&](std::size_t i) {
        images[i] = render(pop.members[i].formation, cfg.canvas);
      });

      std::vector<Score> scores;
      try {
        scores = scorer.score_batch(images);
        if (scores.size() != images.size()) {
          throw ProtocolError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                              std::to_string(images.size()) + " images");
        }
      } catch (const ScorerError& e) {
        result.complete = false;
        result.error = e.what();
        return result;
      }

      const Selection sel = select_best(scores, cfg.b);
      const Formation& champion = pop.members[sel.champion].formation;
      const Score champion_score = scores[sel.champion];
      result.curve.push_back(champion_score);
      result.snapshots.push_back(champion);
      if (iter == 0 || champion_score > result.best_score) {
        result.best_score = champion_score;
        result.best_formation = champion;
      }
      if (hooks.after_iteration) {
        hooks.after_iteration(iter, champion, champion_score);
      }

      if (cfg.early_stop.enabled && result.curve.size() > cfg.early_stop.patience) {
        const std::size_t last = result.curve.size() - 1;
        if (result.curve[last] - result.curve[last - cfg.early_stop.patience] < cfg.early_stop.delta) {
          result.stopped_early = true;
          break;
        }
      }
      if (iter + 1 == cfg.it) {
        break;
      }

      std::vector<Formation> elites;
      elites.reserve(sel.elites.size());
      for (std::size_t idx : sel.elites) {
        elites.push_back(pop.members[idx].formation);
      }

      Rng resample_rng = Rng::for_stream(cfg.seed, iter, Stream::resample);
      Rng alter_rng = Rng::for_stream(cfg.seed, iter, Stream::alter);
      Rng interior_rng = Rng::for_stream(cfg.seed, iter, Stream::interior);
      Rng perturb_rng = Rng::for_stream(cfg.seed, iter, Stream::perturb);
      Rng fresh_rng = Rng::for_stream(cfg.seed, iter, Stream::fresh);

      const std::vector<Formation> resampled = resample_proportional(pop, scores, cfg.k, resample_rng);

      Population next;
      next.generation = iter + 1;
      next.members.reserve(cfg.population_size());
      auto append = [&next](std::vector<Formation>&& fs, Provenance p) {
        for (Formation& f : fs) {
          next.members.push_back({std::move(f), p});
        }
      };
      append(std::vector<Formation>(elites), Provenance::elite);
      append(alter_best(elites, cfg.a, cfg.lim, alter_rng), Provenance::altered_elite);
      append(perturb_interior(elites, cfg.h, cfg.lim, interior_rng), Provenance::interior_perturbed);
      append(perturb_all(resampled, cfg.lim, perturb_rng), Provenance::resampled_perturbed);
      for (std::size_t i = 0; i < cfg.r; ++i) {
        next.members.push_back({random_formation(cfg.m, cfg.workspace, fresh_rng), Provenance::fresh_random});
      }
      pop = std::move(next);
    }
  }
  return result;
}

}  // namespace swarmform
