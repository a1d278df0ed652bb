#pragma once

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "aqkm/aqkm.hpp"

namespace aqkm::cli {

namespace fs = std::filesystem;

/// Settings shared by every subcommand; each command reads what it needs.
struct RunConfig {
  // paths
  fs::path corpus;
  fs::path vectors;
  fs::path test_vectors;
  fs::path model;
  fs::path output_dir;
  fs::path report;

  // pipeline knobs
  double pca_level = 0.05;
  std::string penalty = "inverse_sqrt";
  std::string variant = "active";
  std::string oracle = "simulated";
  std::size_t k = 0;  // 0: number of classes
  double ratio = 0.1;
  std::size_t budget = 0;  // 0: derived from ratio
  std::vector<double> ratios = kDefaultRatios;
  std::size_t trials = 10;
  double test_fraction = 0.2;
  std::uint64_t rng_seed = 42;
  std::size_t max_iterations = 300;
  double tolerance = 1e-6;
  std::size_t threads = 1;
  std::vector<std::string> labels;
  std::string demo_kind = "fig1";
};

/// Thrown for invalid settings (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

inline void require_fraction(double f, const std::string& name) {
  require(f > 0.0 && f <= 1.0, name + " must be in (0, 1]");
}

inline FitConfig fit_config(const RunConfig& c) {
  FitConfig f{.k = c.k, .max_iterations = c.max_iterations, .tolerance = c.tolerance, .rng_seed = c.rng_seed};
  require(c.max_iterations >= 1, "max-iterations must be >= 1");
  require(c.tolerance >= 0.0, "tolerance must be >= 0");
  return f;
}

inline void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// ---------------------------------------------------------------------------

inline int cmd_vectorize(const RunConfig& c, std::ostream& out) {
  require_fraction(c.pca_level, "pca-level");
  const auto docs = read_corpus_jsonl(c.corpus);
  const TfIdfModel tfidf = fit_tfidf(docs);
  std::vector<DenseVector> raw;
  raw.reserve(docs.size());
  for (const auto& d : docs) raw.push_back(transform_tfidf(tfidf, d));
  const PcaModel pca = fit_pca(raw, LevelFraction{c.pca_level});

  std::vector<DenseVector> reduced;
  std::vector<std::string> ids;
  std::vector<std::optional<std::string>> labels;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    reduced.push_back(transform_pca(pca, raw[i]));
    ids.push_back(docs[i].id);
    labels.push_back(docs[i].label);
  }
  const Dataset vectors(std::move(reduced), std::move(ids), std::move(labels));

  prepare_output_dir(c.output_dir);
  write_vectors_csv(c.output_dir / "vectors.csv", vectors);
  write_text_file(c.output_dir / "preprocess_model.json", dump_preprocess_model({tfidf, pca}));

  out << "documents            " << docs.size() << "\n"
      << "vocabulary size      " << tfidf.size() << "\n"
      << "PCA level            " << fixed(c.pca_level * 100, 2) << "%\n"
      << "components           " << pca.output_dim() << "\n"
      << "explained variation  " << fixed(explained_variation(pca)) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

namespace detail {

inline DocumentRenderer corpus_renderer(const fs::path& corpus) {
  if (corpus.empty()) return render_vector_summary;
  std::map<std::string, std::string> text;
  for (const auto& d : read_corpus_jsonl(corpus)) {
    std::string s;
    for (std::size_t i = 0; i < d.tokens.size() && i < 80; ++i) s += (i ? " " : "") + d.tokens[i];
    if (d.tokens.size() > 80) s += " ...";
    text.emplace(d.id, std::move(s));
  }
  return [text = std::move(text)](const Dataset& data, std::size_t index) {
    auto it = text.find(data.id(index));
    return it == text.end() ? render_vector_summary(data, index) : it->second;
  };
}

}  // namespace detail

inline int cmd_train(const RunConfig& c, std::istream& in, std::ostream& out, std::ostream& err) {
  const Variant variant = parse_variant(c.variant);
  const PenaltyKind penalty = parse_penalty_kind(c.penalty);
  require(c.oracle == "simulated" || c.oracle == "interactive", "oracle must be simulated or interactive");
  require_fraction(c.ratio, "ratio");
  FitConfig fit_cfg = fit_config(c);

  const Dataset data = read_vectors_csv(c.vectors, c.labels);
  if (data.empty()) throw EmptySetError("no vectors in " + c.vectors.string());
  const auto& universe = data.label_universe();

  FitResult result;
  SeedSet seeds;
  std::optional<QueryBudget> query_log;
  if (variant == Variant::kUnsupervised) {
    if (fit_cfg.k == 0) fit_cfg.k = universe.size();
    require(fit_cfg.k >= 1, "k is required when the vectors carry no labels");
    result = fit_unsupervised(data, fit_cfg);
  } else {
    require(!universe.empty(), "semi/active training needs labels in the vectors or --labels");
    require(fit_cfg.k == 0 || fit_cfg.k == universe.size(),
            "k must equal the number of classes (" + std::to_string(universe.size()) + ")");
    fit_cfg.k = universe.size();
    const std::size_t budget = c.budget ? c.budget : seed_count_for_ratio(c.ratio, data.size());
    if (budget > data.size()) {
      throw DomainError("query budget " + std::to_string(budget) + " exceeds dataset size " +
                        std::to_string(data.size()));
    }
    std::unique_ptr<LabelOracle> oracle;
    if (c.oracle == "interactive") {
      oracle = std::make_unique<InteractiveOracle>(in, out, budget, universe, detail::corpus_renderer(c.corpus));
    } else {
      oracle = std::make_unique<GroundTruthOracle>(budget);
    }
    const std::uint64_t seeding_seed = derive_seed(c.rng_seed, "seeds");
    try {
      if (variant == Variant::kActive) {
        extend_seed_set(seeds, data, budget, *oracle, penalty, seeding_seed);
      } else if (c.budget) {
        query_random_subset(seeds, data, static_cast<double>(budget) / static_cast<double>(data.size()), *oracle,
                            seeding_seed);
      } else {
        query_random_subset(seeds, data, c.ratio, *oracle, seeding_seed);
      }
    } catch (const AbortedSessionError& e) {
      if (seeds.empty()) throw;
      err << "warning: " << e.what() << "; training with " << seeds.size() << " seeds\n";
    }
    query_log = oracle->budget();
    auto init = centroids_from_seeds(seeds, data, universe, fit_cfg.k, derive_seed(c.rng_seed, "centroids"));
    result = fit(data, std::move(init.centroids), std::move(init.labels), fit_cfg);
  }

  prepare_output_dir(c.output_dir);
  write_text_file(c.output_dir / "model.json", dump_cluster_model(result.model, fit_cfg, variant));
  if (variant != Variant::kUnsupervised) {
    write_text_file(c.output_dir / "seeds.jsonl", dump_seed_set_jsonl(seeds));
    write_text_file(c.output_dir / "queries.jsonl", dump_query_log_jsonl(*query_log));
  }

  out << "variant     " << to_string(variant) << "\n"
      << "points      " << data.size() << "\n"
      << "clusters    " << result.model.k() << "\n";
  if (variant != Variant::kUnsupervised) {
    out << "queries     " << query_log->used() << "\n"
        << "seed gini   " << fixed(gini_index(seeds.labels())) << "\n";
  }
  out << "iterations  " << result.model.iterations_run << (result.converged ? "" : " (not converged)") << "\n"
      << "inertia     " << format_double(result.model.inertia) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

inline std::string report_table(const EvalReport& r) {
  std::ostringstream s;
  s << std::left << std::setw(16) << "class" << std::right << std::setw(11) << "precision" << std::setw(11)
    << "recall" << std::setw(11) << "f1" << std::setw(9) << "support" << "\n";
  auto row = [&](const ClassMetrics& m) {
    s << std::left << std::setw(16) << m.label << std::right << std::setw(11) << fixed(m.precision) << std::setw(11)
      << fixed(m.recall) << std::setw(11) << fixed(m.f1) << std::setw(9) << m.support << "\n";
  };
  for (const auto& m : r.per_class) row(m);
  row(r.macro_average);
  s << "\naccuracy " << fixed(r.accuracy) << "\n\nconfusion (rows: true, columns: predicted)\n";
  s << std::left << std::setw(16) << "";
  for (const auto& l : r.confusion.labels) s << std::right << std::setw(10) << l;
  s << "\n";
  for (std::size_t i = 0; i < r.confusion.labels.size(); ++i) {
    s << std::left << std::setw(16) << r.confusion.labels[i];
    for (std::size_t c : r.confusion.counts[i]) s << std::right << std::setw(10) << c;
    s << "\n";
  }
  return s.str();
}

inline int cmd_evaluate(const RunConfig& c, std::ostream& out) {
  const ClusterModel model = load_cluster_model(read_text_file(c.model));
  const Dataset test = read_vectors_csv(c.vectors);
  if (test.empty()) throw EmptySetError("no vectors in " + c.vectors.string());
  const auto truth = test.required_labels();
  require_same_dim(model.dim(), test.dim());
  const auto predicted = predict_labels(model, test);

  std::vector<std::string> universe = test.label_universe();
  for (const auto& l : model.cluster_labels) {
    if (l && std::find(universe.begin(), universe.end(), *l) == universe.end()) universe.push_back(*l);
  }
  std::sort(universe.begin(), universe.end());
  const EvalReport report = classification_report(predicted, truth, universe);

  const fs::path report_path = c.report.empty() ? fs::path("report.json") : c.report;
  if (report_path.has_parent_path()) prepare_output_dir(report_path.parent_path());
  write_text_file(report_path, dump_eval_report(report));
  out << report_table(report);
  return 0;
}

// ---------------------------------------------------------------------------

inline std::string experiment_summary(const std::vector<ExperimentResult>& semi,
                                      const std::vector<ExperimentResult>& active, std::size_t k,
                                      const ExperimentConfig& cfg, std::size_t train_size, std::size_t test_size) {
  json rows = json::array();
  for (std::size_t i = 0; i < semi.size(); ++i) {
    rows.push_back({{"ratio", semi[i].ratio},
                    {"semi_accuracy", semi[i].mean_accuracy},
                    {"active_accuracy", active[i].mean_accuracy},
                    {"semi_gini", semi[i].mean_gini},
                    {"active_gini", active[i].mean_gini},
                    {"active_at_least_semi", active[i].mean_accuracy >= semi[i].mean_accuracy}});
  }
  json j{{"format", "aqkm.experiment_summary"},
         {"version", kFormatVersion},
         {"classes", k},
         {"max_gini", max_gini(k)},
         {"train_size", train_size},
         {"test_size", test_size},
         {"trials", cfg.trials},
         {"penalty", std::string(to_string(cfg.penalty))},
         {"rng_seed", cfg.fit.rng_seed},
         {"rows", rows}};
  return j.dump(2) + "\n";
}

inline int cmd_experiment(const RunConfig& c, std::ostream& out) {
  require(!c.ratios.empty(), "ratios must not be empty");
  for (double r : c.ratios) require_fraction(r, "every ratio");
  require(c.trials >= 1, "trials must be >= 1");
  require(c.threads >= 1, "threads must be >= 1");
  if (c.test_vectors.empty()) require(c.test_fraction > 0.0 && c.test_fraction < 1.0, "test-fraction must be in (0, 1)");
  ExperimentConfig cfg;
  cfg.ratios = c.ratios;
  cfg.trials = c.trials;
  cfg.penalty = parse_penalty_kind(c.penalty);
  cfg.fit = fit_config(c);
  cfg.threads = c.threads;

  const Dataset data = read_vectors_csv(c.vectors);
  Dataset train, test;
  if (c.test_vectors.empty()) {
    std::tie(train, test) = train_test_split(data, c.test_fraction, derive_seed(c.rng_seed, "split"));
  } else {
    train = data;
    test = read_vectors_csv(c.test_vectors, data.label_universe());
  }

  cfg.variant = Variant::kSemi;
  const auto semi = run_experiment(train, test, cfg);
  cfg.variant = Variant::kActive;
  const auto active = run_experiment(train, test, cfg);
  const std::size_t k = train.label_universe().size();

  prepare_output_dir(c.output_dir);
  write_text_file(c.output_dir / "semi.csv", experiment_csv(semi));
  write_text_file(c.output_dir / "active.csv", experiment_csv(active));
  write_text_file(c.output_dir / "summary.json", experiment_summary(semi, active, k, cfg, train.size(), test.size()));

  out << "train " << train.size() << ", test " << test.size() << ", classes " << k << ", trials " << cfg.trials
      << ", penalty " << to_string(cfg.penalty) << "\n\n";
  out << std::right << std::setw(8) << "ratio" << std::setw(12) << "semi acc" << std::setw(12) << "active acc"
      << std::setw(12) << "semi gini" << std::setw(13) << "active gini" << "  active>=semi\n";
  for (std::size_t i = 0; i < semi.size(); ++i) {
    out << std::setw(7) << fixed(semi[i].ratio * 100, 1) << "%" << std::setw(12) << fixed(semi[i].mean_accuracy)
        << std::setw(12) << fixed(active[i].mean_accuracy) << std::setw(12) << fixed(semi[i].mean_gini)
        << std::setw(13) << fixed(active[i].mean_gini) << "  "
        << (active[i].mean_accuracy >= semi[i].mean_accuracy ? "yes" : "no") << "\n";
  }
  out << "\nmax gini for " << k << " classes: " << fixed(max_gini(k)) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

namespace detail {

inline std::string centroid_csv(const std::vector<DenseVector>& centroids,
                                const std::vector<std::optional<std::string>>& labels) {
  std::string s = "cluster,label";
  for (std::size_t j = 0; j < centroids.front().dim(); ++j) s += ",c" + std::to_string(j);
  s += "\n";
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    s += std::to_string(i) + "," + (labels[i] ? *labels[i] : "");
    for (double x : centroids[i]) s += "," + format_double(x);
    s += "\n";
  }
  return s;
}

inline std::string seed_csv(const SeedSet& seeds) {
  std::string s = "order,id,label";
  for (std::size_t j = 0; j < seeds.entries().front().vector.dim(); ++j) s += ",c" + std::to_string(j);
  s += "\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& e = seeds.entries()[i];
    s += std::to_string(i) + "," + e.id + "," + e.label;
    for (double x : e.vector) s += "," + format_double(x);
    s += "\n";
  }
  return s;
}

}  // namespace detail

inline const std::vector<std::vector<double>> kDemoMeans{{0, 0}, {6, 0}, {3, 5}};

inline int cmd_demo(const RunConfig& c, std::ostream& out) {
  require(c.demo_kind == "fig1" || c.demo_kind == "fig2" || c.demo_kind == "fig3", "kind must be fig1, fig2 or fig3");
  const std::uint64_t seed = c.rng_seed;
  std::map<std::string, std::string> files;

  if (c.demo_kind == "fig1") {
    const Dataset data = make_gaussian_mixture(kDemoMeans, {1, 1, 1}, {100, 100, 100}, seed);
    const auto r = fit_unsupervised(data, FitConfig{.k = 3, .rng_seed = seed});
    files["points.csv"] = [&] {
      std::ostringstream s;
      write_vectors_csv(s, data);
      return s.str();
    }();
    files["centroids.csv"] = detail::centroid_csv(r.model.centroids, r.model.cluster_labels);
    out << "fig1: 300 points, 3 clusters, " << r.model.iterations_run << " iterations\n"
        << "initial inertia " << format_double(r.inertia_trace.front()) << "\n"
        << "final inertia   " << format_double(r.model.inertia) << "\n";
  } else if (c.demo_kind == "fig2") {
    const Dataset data = make_gaussian_mixture(kDemoMeans, {1, 1, 1}, {100, 100, 100}, seed);
    // 2 labeled points from class0, 4 from class1, 2 from class2
    const std::vector<std::size_t> per_class{2, 4, 2};
    Rng rng(derive_seed(seed, "fig2-labeled"));
    SeedSet seeds;
    for (std::size_t cls = 0; cls < 3; ++cls) {
      for (std::size_t i : rng.sample_without_replacement(100, per_class[cls])) {
        const std::size_t idx = cls * 100 + i;
        seeds.add({idx, data.id(idx), data.point(idx), *data.label(idx)});
      }
    }
    const auto init = centroids_from_seeds(seeds, data, data.label_universe(), 3, seed);
    const auto r = fit(data, init.centroids, init.labels, FitConfig{.k = 3, .rng_seed = seed});
    files["points.csv"] = [&] {
      std::ostringstream s;
      write_vectors_csv(s, data);
      return s.str();
    }();
    files["seeds.csv"] = detail::seed_csv(seeds);
    files["initial_centroids.csv"] = detail::centroid_csv(init.centroids, init.labels);
    files["centroids.csv"] = detail::centroid_csv(r.model.centroids, r.model.cluster_labels);
    out << "fig2: 8 labeled points (2/4/2), 3 initial centroids, " << r.model.iterations_run
        << " iterations to convergence\n";
  } else {
    const Dataset data = make_gaussian_mixture(kDemoMeans, {1, 1, 1}, {67, 67, 66}, seed);
    GroundTruthOracle oracle(10, [] { return std::int64_t{0}; });
    const SeedSet seeds = build_seed_set(data, 10, oracle, PenaltyKind::kInverseSqrt, seed);
    files["points.csv"] = [&] {
      std::ostringstream s;
      write_vectors_csv(s, data);
      return s.str();
    }();
    files["seeds.csv"] = detail::seed_csv(seeds);
    out << "fig3: 200 points, 10 queries, classes covered " << seeds.label_counts().size() << ", seed gini "
        << fixed(gini_index(seeds.labels())) << "\n";
  }

  prepare_output_dir(c.output_dir);
  for (const auto& [name, content] : files) write_text_file(c.output_dir / name, content);
  return 0;
}

// ---------------------------------------------------------------------------

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kRuntimeError = 3 };

inline int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kDomain: return kUsage;
    case ErrorKind::kDimension:
    case ErrorKind::kEmptySet:
    case ErrorKind::kInsufficientData:
    case ErrorKind::kLookup:
    case ErrorKind::kMissingLabel:
    case ErrorKind::kParse:
    case ErrorKind::kIo: return kDataError;
    case ErrorKind::kBudget:
    case ErrorKind::kAbortedSession: return kRuntimeError;
  }
  return kRuntimeError;
}

}  // namespace aqkm::cli
