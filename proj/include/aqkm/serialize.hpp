#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqkm/errors.hpp"
#include "aqkm/eval.hpp"
#include "aqkm/experiment.hpp"
#include "aqkm/io.hpp"
#include "aqkm/kmeans.hpp"
#include "aqkm/oracle.hpp"
#include "aqkm/preprocess.hpp"
#include "aqkm/seeding.hpp"

namespace aqkm {

using json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

namespace detail {

inline json vector_json(const DenseVector& v) { return json(std::vector<double>(v.begin(), v.end())); }

inline DenseVector vector_from_json(const json& j) { return DenseVector(j.get<std::vector<double>>()); }

inline void check_header(const json& j, const std::string& format) {
  if (!j.is_object() || j.value("format", "") != format) throw ParseError(0, "not a " + format + " document");
  if (j.value("version", 0) != kFormatVersion) {
    throw ParseError(0, format + " version " + std::to_string(j.value("version", 0)) + " is not supported");
  }
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
}

/// Scalar JSON value (string or number) as text.
inline std::string scalar_text(const json& j, std::size_t line, const char* field) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw ParseError(line, std::string("field '") + field + "' must be a string or number");
}

}  // namespace detail

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------
// Corpus: one `{"id": ..., "label": ... | null, "tokens": [...]}` per line.

inline std::vector<TokenizedDocument> read_corpus_jsonl(std::istream& in) {
  std::vector<TokenizedDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("tokens") || !j["tokens"].is_array()) {
      throw ParseError(line_no, "expected an object with 'id' and a 'tokens' array");
    }
    TokenizedDocument doc;
    doc.id = detail::scalar_text(j["id"], line_no, "id");
    if (j.contains("label") && !j["label"].is_null()) doc.label = detail::scalar_text(j["label"], line_no, "label");
    for (const auto& t : j["tokens"]) {
      if (!t.is_string()) throw ParseError(line_no, "tokens must be strings");
      doc.tokens.push_back(t.get<std::string>());
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline std::vector<TokenizedDocument> read_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_corpus_jsonl(in);
}

// ---------------------------------------------------------------------------
// Preprocessing models

inline json to_json(const TfIdfModel& m) {
  return json{{"vocabulary", m.vocabulary()}, {"idf", m.idf()}, {"doc_count", m.doc_count()}};
}

inline json to_json(const PcaModel& m) {
  json comps = json::array();
  for (const auto& c : m.components) comps.push_back(detail::vector_json(c));
  return json{{"mean", detail::vector_json(m.mean)},
              {"components", comps},
              {"explained_variance_ratio", m.explained_variance_ratio}};
}

struct PreprocessModel {
  TfIdfModel tfidf;
  std::optional<PcaModel> pca;
};

inline std::string dump_preprocess_model(const PreprocessModel& m) {
  json j{{"format", "aqkm.preprocess"}, {"version", kFormatVersion}, {"tfidf", to_json(m.tfidf)}};
  j["pca"] = m.pca ? to_json(*m.pca) : json(nullptr);
  return j.dump(2) + "\n";
}

inline PreprocessModel load_preprocess_model(const std::string& text) {
  const json j = detail::parse_json_text(text);
  detail::check_header(j, "aqkm.preprocess");
  try {
    const auto& t = j.at("tfidf");
    PreprocessModel m{TfIdfModel(t.at("vocabulary").get<std::vector<std::string>>(),
                                 t.at("idf").get<std::vector<double>>(), t.at("doc_count").get<std::size_t>()),
                      std::nullopt};
    if (!j.at("pca").is_null()) {
      const auto& p = j["pca"];
      PcaModel pca{detail::vector_from_json(p.at("mean")), {}, p.at("explained_variance_ratio").get<std::vector<double>>()};
      for (const auto& c : p.at("components")) pca.components.push_back(detail::vector_from_json(c));
      m.pca = std::move(pca);
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
}

// ---------------------------------------------------------------------------
// Cluster model

inline std::string dump_cluster_model(const ClusterModel& m, const FitConfig& config, Variant variant) {
  json centroids = json::array();
  for (const auto& c : m.centroids) centroids.push_back(detail::vector_json(c));
  json labels = json::array();
  for (const auto& l : m.cluster_labels) labels.push_back(l ? json(*l) : json(nullptr));
  json j{{"format", "aqkm.cluster_model"},
         {"version", kFormatVersion},
         {"variant", std::string(to_string(variant))},
         {"centroids", centroids},
         {"labels", labels},
         {"inertia", m.inertia},
         {"iterations", m.iterations_run},
         {"config",
          {{"k", config.k},
           {"max_iterations", config.max_iterations},
           {"tolerance", config.tolerance},
           {"rng_seed", config.rng_seed}}}};
  return j.dump(2) + "\n";
}

inline ClusterModel load_cluster_model(const std::string& text) {
  const json j = detail::parse_json_text(text);
  detail::check_header(j, "aqkm.cluster_model");
  try {
    ClusterModel m;
    for (const auto& c : j.at("centroids")) m.centroids.push_back(detail::vector_from_json(c));
    for (const auto& l : j.at("labels")) {
      m.cluster_labels.push_back(l.is_null() ? std::nullopt : std::optional<std::string>(l.get<std::string>()));
    }
    m.inertia = j.at("inertia").get<double>();
    m.iterations_run = j.at("iterations").get<std::size_t>();
    if (m.centroids.empty()) throw ParseError(0, "model has no centroids");
    if (m.cluster_labels.size() != m.centroids.size()) throw ParseError(0, "one label entry per centroid expected");
    for (const auto& c : m.centroids) require_same_dim(m.centroids.front().dim(), c.dim());
    return m;
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
}

// ---------------------------------------------------------------------------
// Seed sets and query logs (JSON-lines, selection order)

inline std::string dump_seed_set_jsonl(const SeedSet& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& e = seeds.entries()[i];
    out += json{{"order", i}, {"id", e.id}, {"label", e.label}}.dump() + "\n";
  }
  return out;
}

struct SeedRecord {
  std::size_t order = 0;
  std::string id;
  std::string label;
};

inline std::vector<SeedRecord> read_seed_records_jsonl(std::istream& in) {
  std::vector<SeedRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      out.push_back({j.at("order").get<std::size_t>(), detail::scalar_text(j.at("id"), line_no, "id"),
                     detail::scalar_text(j.at("label"), line_no, "label")});
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

/// Rebuilds a seed set against `data` from its persisted records.
inline SeedSet seed_set_from_records(const std::vector<SeedRecord>& records, const Dataset& data) {
  SeedSet seeds;
  for (const auto& r : records) {
    const std::size_t i = data.index_of(r.id);
    seeds.add({i, r.id, data.point(i), r.label});
  }
  return seeds;
}

inline std::string dump_query_log_jsonl(const QueryBudget& budget) {
  std::string out;
  for (std::size_t i = 0; i < budget.log().size(); ++i) {
    const auto& r = budget.log()[i];
    out += json{{"order", i}, {"id", r.id}, {"label", r.label}, {"timestamp_ms", r.timestamp_ms}}.dump() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation and experiment output

inline json to_json(const ClassMetrics& m) {
  return json{{"label", m.label}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

inline std::string dump_eval_report(const EvalReport& r) {
  json per_class = json::array();
  for (const auto& m : r.per_class) per_class.push_back(to_json(m));
  json j{{"format", "aqkm.eval_report"},
         {"version", kFormatVersion},
         {"accuracy", r.accuracy},
         {"per_class", per_class},
         {"macro_average", to_json(r.macro_average)},
         {"confusion", {{"labels", r.confusion.labels}, {"counts", r.confusion.counts}}}};
  return j.dump(2) + "\n";
}

/// `ratio,trial,rng_seed,accuracy,gini` rows.
inline std::string experiment_csv(const std::vector<ExperimentResult>& results) {
  std::string out = "ratio,trial,rng_seed,accuracy,gini\n";
  for (const auto& r : results) {
    for (const auto& t : r.trials) {
      out += format_double(r.ratio) + "," + std::to_string(t.trial) + "," + std::to_string(t.rng_seed) + "," +
             format_double(t.accuracy) + "," + format_double(t.gini) + "\n";
    }
  }
  return out;
}

inline json to_json(const ExperimentResult& r) {
  return json{{"ratio", r.ratio}, {"mean_accuracy", r.mean_accuracy}, {"mean_gini", r.mean_gini}, {"trials", r.trials.size()}};
}

}  // namespace aqkm
