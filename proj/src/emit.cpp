#include "sketchbound/emit.hpp"

#include "sketchbound/errors.hpp"
#include "sketchbound/matrix_market.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace sketchbound {

namespace {

constexpr const char* kFixedColumns[] = {"k",      "p",           "oversampling",   "q",
                                         "norm",   "metric",      "empirical_mean", "empirical_std"};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw IoError("csv: bad number '" + s + "'");
  return v;
}

Index parse_index(const std::string& s) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw IoError("csv: bad integer '" + s + "'");
  return static_cast<Index>(v);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string rows_to_csv(const std::vector<SweepRow>& rows, const std::vector<std::string>& variants) {
  std::ostringstream out;
  for (std::size_t i = 0; i < std::size(kFixedColumns); ++i) out << (i ? "," : "") << kFixedColumns[i];
  for (const auto& v : variants) out << ',' << v;
  out << '\n';
  for (const auto& r : rows) {
    out << r.k << ',' << r.p << ',' << r.oversampling << ',' << r.q << ',' << to_string(r.norm) << ','
        << to_string(r.metric) << ',' << format_double(r.empirical_mean) << ','
        << format_double(r.empirical_std);
    for (const auto& v : variants) {
      out << ',';
      if (auto it = r.bounds.find(v); it != r.bounds.end()) out << format_double(it->second);
    }
    out << '\n';
  }
  return out.str();
}

std::vector<SweepRow> rows_from_csv(const std::string& text, std::vector<std::string>* variants) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("csv: empty input");
  const auto header = split(line);
  const std::size_t fixed = std::size(kFixedColumns);
  if (header.size() < fixed) throw IoError("csv: header too short");
  for (std::size_t i = 0; i < fixed; ++i)
    if (header[i] != kFixedColumns[i]) throw IoError("csv: unexpected column '" + header[i] + "'");
  const std::vector<std::string> names(header.begin() + static_cast<std::ptrdiff_t>(fixed), header.end());
  if (variants) *variants = names;

  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw IoError("csv: row has " + std::to_string(cells.size()) + " cells");
    SweepRow r;
    r.k = parse_index(cells[0]);
    r.p = parse_index(cells[1]);
    r.oversampling = parse_index(cells[2]);
    r.q = parse_index(cells[3]);
    r.norm = parse_norm(cells[4]);
    r.metric = parse_metric(cells[5]);
    r.empirical_mean = parse_double(cells[6]);
    r.empirical_std = parse_double(cells[7]);
    for (std::size_t i = 0; i < names.size(); ++i)
      if (!cells[fixed + i].empty()) r.bounds.emplace(names[i], parse_double(cells[fixed + i]));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string rows_to_json(const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["k"] = r.k;
    o["p"] = r.p;
    o["oversampling"] = r.oversampling;
    o["q"] = r.q;
    o["norm"] = std::string(to_string(r.norm));
    o["metric"] = std::string(to_string(r.metric));
    o["empirical_mean"] = r.empirical_mean;
    o["empirical_std"] = r.empirical_std;
    nlohmann::ordered_json b = nlohmann::ordered_json::object();
    for (const auto& [name, value] : r.bounds) b[name] = value;
    o["bounds"] = b;
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

std::vector<SweepRow> rows_from_json(const std::string& text) {
  std::vector<SweepRow> rows;
  try {
    const auto arr = nlohmann::json::parse(text);
    auto num = [](const nlohmann::json& v) {
      return v.is_null() ? std::nan("") : v.get<double>();
    };
    for (const auto& o : arr) {
      SweepRow r;
      r.k = o.at("k").get<Index>();
      r.p = o.at("p").get<Index>();
      r.oversampling = o.at("oversampling").get<Index>();
      r.q = o.at("q").get<Index>();
      r.norm = parse_norm(o.at("norm").get<std::string>());
      r.metric = parse_metric(o.at("metric").get<std::string>());
      r.empirical_mean = num(o.at("empirical_mean"));
      r.empirical_std = num(o.at("empirical_std"));
      for (const auto& [name, value] : o.at("bounds").items()) r.bounds.emplace(name, num(value));
      rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("json rows: ") + e.what());
  }
  return rows;
}

void emit(const std::vector<SweepRow>& rows, const std::vector<std::string>& variants,
          const std::string& format, const std::filesystem::path& path) {
  if (rows.empty()) throw PreconditionError("emit: no rows");
  if (format == "csv")
    write_text_atomically(path, rows_to_csv(rows, variants));
  else if (format == "json")
    write_text_atomically(path, rows_to_json(rows));
  else
    throw PreconditionError("emit: unknown format '" + format + "'");
}

}  // namespace sketchbound
