#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "aqkm/errors.hpp"
#include "aqkm/eval.hpp"
#include "aqkm/kmeans.hpp"
#include "aqkm/oracle.hpp"
#include "aqkm/random.hpp"
#include "aqkm/seeding.hpp"
#include "aqkm/vecspace.hpp"

namespace aqkm {

enum class Variant { kUnsupervised, kSemi, kActive };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kUnsupervised: return "unsupervised";
    case Variant::kSemi: return "semi";
    case Variant::kActive: return "active";
  }
  return "?";
}

inline Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kUnsupervised, Variant::kSemi, Variant::kActive}) {
    if (to_string(v) == name) return v;
  }
  throw DomainError("unknown variant '" + std::string(name) + "'");
}

/// Labeled-proportion sweep used by default: 1% to 10%.
inline const std::vector<double> kDefaultRatios = {0.01, 0.02, 0.03, 0.04, 0.05, 0.075, 0.10};

struct ExperimentConfig {
  Variant variant = Variant::kActive;
  std::vector<double> ratios = kDefaultRatios;
  std::size_t trials = 10;
  PenaltyKind penalty = kDefaultPenalty;
  /// `k` is taken from the training label universe; `rng_seed` is the root seed.
  FitConfig fit;
  /// Worker threads for independent trials. Results do not depend on it.
  std::size_t threads = 1;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t rng_seed = 0;
  double accuracy = 0.0;
  double gini = 0.0;
  std::size_t seed_count = 0;
  std::size_t iterations = 0;
};

struct ExperimentResult {
  double ratio = 0.0;
  double mean_accuracy = 0.0;
  double mean_gini = 0.0;
  std::vector<TrialRecord> trials;
};

/// Seed for trial `t`. Shared across ratios and variants so that a sweep
/// compares methods under common random numbers.
inline std::uint64_t trial_seed(std::uint64_t root, std::size_t trial) { return derive_seed(root, "trial", trial); }

struct TrialOutcome {
  SeedSet seeds;
  FitResult fit;
  std::vector<std::string> predicted;
};

/// Seed selection, centroid initialization and Lloyd fit for one
/// semi/active run. Active seeding queries a ground-truth oracle.
inline TrialOutcome run_seeded_fit(const Dataset& train, Variant variant, double ratio, PenaltyKind penalty,
                                   FitConfig fit_config, std::uint64_t seed) {
  const auto& universe = train.label_universe();
  fit_config.k = universe.size();
  fit_config.rng_seed = seed;
  TrialOutcome out;
  const std::size_t budget = seed_count_for_ratio(ratio, train.size());
  switch (variant) {
    case Variant::kSemi:
      out.seeds = random_seed_subset(train, ratio, derive_seed(seed, "seeds"));
      break;
    case Variant::kActive: {
      GroundTruthOracle oracle(budget, [] { return std::int64_t{0}; });
      out.seeds = build_seed_set(train, budget, oracle, penalty, derive_seed(seed, "seeds"));
      break;
    }
    case Variant::kUnsupervised:
      throw DomainError("seeded fit needs the semi or active variant");
  }
  auto init = centroids_from_seeds(out.seeds, train, universe, fit_config.k, derive_seed(seed, "centroids"));
  out.fit = fit(train, std::move(init.centroids), std::move(init.labels), fit_config);
  return out;
}

inline std::vector<std::string> predict_labels(const ClusterModel& model, const Dataset& data) {
  std::vector<std::string> out;
  out.reserve(data.size());
  for (const auto& p : data.points()) {
    auto pred = predict(model, p);
    if (!pred.label) throw MissingLabelError("cluster " + std::to_string(pred.cluster) + " has no class label");
    out.push_back(*pred.label);
  }
  return out;
}

inline std::vector<ExperimentResult> run_experiment(const Dataset& train, const Dataset& test,
                                                    const ExperimentConfig& config) {
  if (config.variant == Variant::kUnsupervised) throw DomainError("experiments compare the semi and active variants");
  if (config.trials < 1) throw DomainError("trials must be >= 1");
  if (config.ratios.empty()) throw EmptySetError("no ratios to sweep");
  if (train.empty() || test.empty()) throw EmptySetError("train and test splits must be nonempty");
  if (train.label_universe().empty()) throw MissingLabelError("training data carries no labels");
  for (double r : config.ratios) {
    if (!(r > 0.0 && r <= 1.0)) throw DomainError("ratio " + std::to_string(r) + " outside (0, 1]");
  }
  const std::vector<std::string> train_truth = train.required_labels();
  const std::vector<std::string> test_truth = test.required_labels();
  for (const auto& l : test_truth) {
    const auto& u = train.label_universe();
    if (std::find(u.begin(), u.end(), l) == u.end()) {
      throw DomainError("test label '" + l + "' does not occur in the training universe");
    }
  }
  FitConfig fit_config = config.fit;
  fit_config.k = train.label_universe().size();
  fit_config.validate();

  const std::size_t tasks = config.ratios.size() * config.trials;
  std::vector<TrialRecord> records(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= tasks) return;
      const std::size_t r = task / config.trials;
      const std::size_t t = task % config.trials;
      try {
        const std::uint64_t seed = trial_seed(config.fit.rng_seed, t);
        auto outcome = run_seeded_fit(train, config.variant, config.ratios[r], config.penalty, fit_config, seed);
        const auto seed_labels = outcome.seeds.labels();
        records[task] = TrialRecord{t,
                                    seed,
                                    accuracy(predict_labels(outcome.fit.model, test), test_truth),
                                    gini_index(seed_labels),
                                    outcome.seeds.size(),
                                    outcome.fit.model.iterations_run};
      } catch (...) {
        errors[task] = std::current_exception();
      }
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(config.threads, 1, tasks);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<ExperimentResult> results;
  for (std::size_t r = 0; r < config.ratios.size(); ++r) {
    ExperimentResult res;
    res.ratio = config.ratios[r];
    for (std::size_t t = 0; t < config.trials; ++t) {
      const auto& rec = records[r * config.trials + t];
      res.trials.push_back(rec);
      res.mean_accuracy += rec.accuracy;
      res.mean_gini += rec.gini;
    }
    res.mean_accuracy /= static_cast<double>(config.trials);
    res.mean_gini /= static_cast<double>(config.trials);
    results.push_back(std::move(res));
  }
  return results;
}

/// Splits `data` with a seeded shuffle and runs the sweep on the parts.
inline std::vector<ExperimentResult> run_experiment(const Dataset& data, double test_fraction,
                                                    const ExperimentConfig& config) {
  auto [train, test] = train_test_split(data, test_fraction, derive_seed(config.fit.rng_seed, "split"));
  return run_experiment(train, test, config);
}

}  // namespace aqkm
