#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "aqkm/errors.hpp"
#include "aqkm/vecspace.hpp"

namespace aqkm {

struct QueryRecord {
  std::string id;
  std::string label;
  /// Milliseconds since the Unix epoch.
  std::int64_t timestamp_ms = 0;
};

/// Query allowance plus the append-only log of answered queries.
class QueryBudget {
 public:
  explicit QueryBudget(std::size_t limit) : limit_(limit) {
    if (limit_ < 1) throw DomainError("query budget limit must be >= 1");
  }

  std::size_t limit() const noexcept { return limit_; }
  std::size_t used() const noexcept { return log_.size(); }
  std::size_t remaining() const noexcept { return limit_ - log_.size(); }
  bool exhausted() const noexcept { return log_.size() >= limit_; }
  const std::vector<QueryRecord>& log() const noexcept { return log_; }

  void record(QueryRecord r) {
    if (exhausted()) throw BudgetError("query budget of " + std::to_string(limit_) + " exhausted");
    log_.push_back(std::move(r));
  }

 private:
  std::size_t limit_;
  std::vector<QueryRecord> log_;
};

using Clock = std::function<std::int64_t()>;

inline std::int64_t system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

/// Source of class labels for queried points. Budget checks, id lookup and
/// logging live here; subclasses only produce the answer.
class LabelOracle {
 public:
  explicit LabelOracle(std::size_t limit, Clock clock = system_clock_ms)
      : budget_(limit), clock_(std::move(clock)) {}
  virtual ~LabelOracle() = default;

  std::string query(const Dataset& data, const std::string& id) { return query_index(data, data.index_of(id)); }

  std::string query_index(const Dataset& data, std::size_t index) {
    if (index >= data.size()) throw LookupError("point index " + std::to_string(index) + " out of range");
    if (budget_.exhausted()) {
      throw BudgetError("query budget of " + std::to_string(budget_.limit()) + " exhausted");
    }
    std::string label = answer(data, index);
    budget_.record({data.id(index), label, clock_()});
    return label;
  }

  const QueryBudget& budget() const noexcept { return budget_; }

 protected:
  virtual std::string answer(const Dataset& data, std::size_t index) = 0;

 private:
  QueryBudget budget_;
  Clock clock_;
};

/// Answers from the dataset's stored labels.
class GroundTruthOracle final : public LabelOracle {
 public:
  using LabelOracle::LabelOracle;

 protected:
  std::string answer(const Dataset& data, std::size_t index) override {
    const auto& l = data.label(index);
    if (!l) throw MissingLabelError("point '" + data.id(index) + "' has no ground-truth label");
    return *l;
  }
};

/// Renders a point for a human annotator.
using DocumentRenderer = std::function<std::string(const Dataset&, std::size_t)>;

inline std::string render_vector_summary(const Dataset& data, std::size_t index) {
  std::string s = "vector [";
  const auto& p = data.point(index);
  const std::size_t shown = std::min<std::size_t>(p.dim(), 8);
  for (std::size_t j = 0; j < shown; ++j) {
    if (j) s += ", ";
    s += std::to_string(p[j]);
  }
  if (shown < p.dim()) s += ", ...";
  return s + "]";
}

/// Prompts on `out`, reads one label per line from `in`. Anything outside
/// the label set is rejected and re-prompted; end of input aborts.
class InteractiveOracle final : public LabelOracle {
 public:
  InteractiveOracle(std::istream& in, std::ostream& out, std::size_t limit,
                    std::vector<std::string> label_universe, DocumentRenderer render = render_vector_summary,
                    Clock clock = system_clock_ms)
      : LabelOracle(limit, std::move(clock)),
        in_(in),
        out_(out),
        universe_(std::move(label_universe)),
        render_(std::move(render)) {
    if (universe_.empty()) throw EmptySetError("interactive oracle needs a nonempty label set");
  }

 protected:
  std::string answer(const Dataset& data, std::size_t index) override {
    out_ << "\n[query " << budget().used() + 1 << "/" << budget().limit() << "] id " << data.id(index) << "\n"
         << render_(data, index) << "\nlabels:";
    for (const auto& l : universe_) out_ << ' ' << l;
    out_ << '\n';
    std::string line;
    for (;;) {
      out_ << "label> " << std::flush;
      if (!std::getline(in_, line)) {
        throw AbortedSessionError("input closed after " + std::to_string(budget().used()) + " answered queries");
      }
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
      std::size_t start = line.find_first_not_of(" \t");
      line = start == std::string::npos ? std::string() : line.substr(start);
      if (std::find(universe_.begin(), universe_.end(), line) != universe_.end()) return line;
      out_ << "'" << line << "' is not one of the labels above\n";
    }
  }

 private:
  std::istream& in_;
  std::ostream& out_;
  std::vector<std::string> universe_;
  DocumentRenderer render_;
};

}  // namespace aqkm
