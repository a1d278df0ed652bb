#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aqkm/errors.hpp"
#include "aqkm/vecspace.hpp"

namespace aqkm {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

inline double parse_double(std::string_view text, std::size_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Vector CSV: optional header `id,label,c0,...`, then `id,label,c0,c1,...`
// per point. An empty label field means unlabeled.

inline Dataset read_vectors_csv(std::istream& in, std::vector<std::string> label_universe = {}) {
  std::vector<DenseVector> points;
  std::vector<std::string> ids;
  std::vector<std::optional<std::string>> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("id,label", 0) == 0) continue;
    auto fields = split_fields(line);
    if (fields.size() < 3) throw ParseError(line_no, "expected id,label,c0[,c1...]");
    if (fields[0].empty()) throw ParseError(line_no, "empty point id");
    std::vector<double> comps;
    comps.reserve(fields.size() - 2);
    for (std::size_t i = 2; i < fields.size(); ++i) comps.push_back(parse_double(fields[i], line_no));
    if (!points.empty() && comps.size() != points.front().dim()) {
      throw ParseError(line_no, "row has " + std::to_string(comps.size()) + " components, expected " +
                                    std::to_string(points.front().dim()));
    }
    try {
      points.emplace_back(std::move(comps));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    ids.emplace_back(fields[0]);
    if (fields[1].empty()) {
      labels.emplace_back(std::nullopt);
    } else {
      labels.emplace_back(std::string(fields[1]));
    }
  }
  return Dataset(std::move(points), std::move(ids), std::move(labels), std::move(label_universe));
}

inline Dataset read_vectors_csv(const std::filesystem::path& path,
                                std::vector<std::string> label_universe = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_vectors_csv(in, std::move(label_universe));
}

inline void check_csv_field(const std::string& s) {
  if (s.find_first_of(",\n\r") != std::string::npos) {
    throw DomainError("field '" + s + "' cannot be written to CSV (contains a separator)");
  }
}

inline void write_vectors_csv(std::ostream& out, const Dataset& data) {
  out << "id,label";
  for (std::size_t j = 0; j < data.dim(); ++j) out << ",c" << j;
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    check_csv_field(data.id(i));
    out << data.id(i) << ',';
    if (const auto& l = data.label(i)) {
      check_csv_field(*l);
      out << *l;
    }
    for (double c : data.point(i)) out << ',' << format_double(c);
    out << '\n';
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

inline void write_vectors_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ostringstream s;
  write_vectors_csv(s, data);
  write_text_file(path, s.str());
}

}  // namespace aqkm
