#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace aqkm;
using namespace aqkm::cli;

namespace {

void add_fit_options(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--seed", c.rng_seed, "Root random seed")->capture_default_str();
  cmd->add_option("--max-iterations", c.max_iterations, "Lloyd iteration cap")->capture_default_str();
  cmd->add_option("--tolerance", c.tolerance, "Centroid-shift convergence threshold")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised and active-query K-means"};
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
  app.require_subcommand(1);
  RunConfig c;

  auto* vectorize = app.add_subcommand("vectorize", "TF-IDF + PCA vectors from a tokenized JSON-lines corpus");
  vectorize->add_option("--corpus", c.corpus, "Corpus (JSON-lines)")->required()->check(CLI::ExistingFile);
  vectorize->add_option("--output-dir,-o", c.output_dir, "Output directory")->required();
  vectorize->add_option("--pca-level", c.pca_level, "Retained fraction of the vocabulary dimension")
      ->capture_default_str();

  auto* train = app.add_subcommand("train", "Fit an unsupervised, semi or active K-means model");
  train->add_option("--vectors", c.vectors, "Vector CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--output-dir,-o", c.output_dir, "Output directory")->required();
  train->add_option("--variant", c.variant, "unsupervised | semi | active")->capture_default_str();
  train->add_option("--k", c.k, "Cluster count (defaults to the number of classes)");
  train->add_option("--ratio", c.ratio, "Labeled/query fraction of the data")->capture_default_str();
  train->add_option("--budget", c.budget, "Explicit query count (overrides --ratio)");
  train->add_option("--penalty", c.penalty, "inverse_exp | inverse_log | inverse | inverse_square | inverse_sqrt")
      ->capture_default_str();
  train->add_option("--oracle", c.oracle, "simulated | interactive")->capture_default_str();
  train->add_option("--corpus", c.corpus, "Corpus shown to the annotator in interactive mode")
      ->check(CLI::ExistingFile);
  train->add_option("--labels", c.labels, "Closed label set (when the vectors are unlabeled)")->delimiter(',');
  add_fit_options(train, c);

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on labeled test vectors");
  evaluate->add_option("--model", c.model, "Model JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--vectors", c.vectors, "Labeled test vector CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--report", c.report, "Report JSON path")->capture_default_str();

  auto* experiment = app.add_subcommand("experiment", "Semi vs active sweep over labeled/query ratios");
  experiment->add_option("--vectors", c.vectors, "Labeled vector CSV")->required()->check(CLI::ExistingFile);
  experiment->add_option("--test-vectors", c.test_vectors, "Held-out test CSV (else split --vectors)")
      ->check(CLI::ExistingFile);
  experiment->add_option("--test-fraction", c.test_fraction, "Test share when splitting")->capture_default_str();
  experiment->add_option("--ratios", c.ratios, "Comma-separated ratios")->delimiter(',')->capture_default_str();
  experiment->add_option("--trials", c.trials, "Repetitions per ratio")->capture_default_str();
  experiment->add_option("--penalty", c.penalty, "Penalty function for the active variant")->capture_default_str();
  experiment->add_option("--threads", c.threads, "Worker threads (results do not depend on it)")
      ->capture_default_str();
  experiment->add_option("--output-dir,-o", c.output_dir, "Output directory")->required();
  add_fit_options(experiment, c);

  auto* demo = app.add_subcommand("demo", "Regenerate the synthetic demonstration data");
  demo->add_option("--kind", c.demo_kind, "fig1 | fig2 | fig3")->capture_default_str();
  demo->add_option("--seed", c.rng_seed, "Random seed")->capture_default_str();
  demo->add_option("--output-dir,-o", c.output_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*vectorize) return cmd_vectorize(c, std::cout);
    if (*train) return cmd_train(c, std::cin, std::cout, std::cerr);
    if (*evaluate) return cmd_evaluate(c, std::cout);
    if (*experiment) return cmd_experiment(c, std::cout);
    if (*demo) return cmd_demo(c, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsage;
}
