#include "pada/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace pada {

namespace {

std::string trimmed(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void row_fail(const std::string& path, long line,
                           const std::string& what) {
  fail(ErrorCode::parse,
       path + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, const std::string& path,
                    long line, const char* field) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + tok.size() || tok.empty())
    row_fail(path, line, std::string("cannot parse ") + field + " '" + tok +
                             "'");
  if (!std::isfinite(v))
    row_fail(path, line, std::string(field) + " is not finite");
  return v;
}

}  // namespace

CurveCsv read_curve_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path);

  std::string line;
  long line_no = 0;
  require(bool(std::getline(in, line)), ErrorCode::parse,
          path + ": empty file");
  ++line_no;
  require(trimmed(line) == "curve_id,time,value", ErrorCode::parse,
          path + ":1: expected header 'curve_id,time,value'");

  // (time, value) rows per id; map keeps ids ascending
  std::map<long, std::vector<std::pair<double, double>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ss, tok, ',')) fields.push_back(trimmed(tok));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (fields.size() != 3)
      row_fail(path, line_no, "expected 3 fields, got " +
                                  std::to_string(fields.size()));
    const char* begin = fields[0].c_str();
    char* end = nullptr;
    long id = std::strtol(begin, &end, 10);
    if (end != begin + fields[0].size() || fields[0].empty())
      row_fail(path, line_no, "cannot parse curve_id '" + fields[0] + "'");
    if (id < 1) row_fail(path, line_no, "curve_id must be >= 1");
    double t = parse_double(fields[1], path, line_no, "time");
    double v = parse_double(fields[2], path, line_no, "value");
    if (t < 0.0 || t > 1.0) row_fail(path, line_no, "time outside [0,1]");
    rows[id].emplace_back(t, v);
  }
  require(!rows.empty(), ErrorCode::parse, path + ": no data rows");

  CurveCsv out;
  long prev = 0;
  for (auto& [id, obs] : rows) {
    if (prev != 0)
      for (long g = prev + 1; g < id; ++g) out.gap_ids.push_back(g);
    prev = id;
    std::stable_sort(obs.begin(), obs.end(),
                     [](const auto& a, const auto& b) {
                       return a.first < b.first;
                     });
    SampledCurve c;
    c.times.reserve(obs.size());
    c.values.reserve(obs.size());
    for (const auto& [t, v] : obs) {
      c.times.push_back(t);
      c.values.push_back(v);
    }
    out.curve_ids.push_back(id);
    out.data.curves.push_back(std::move(c));
  }
  out.data.validate();
  return out;
}

void write_curve_csv(const std::string& path, const FtsDataset& data,
                     const std::vector<long>& curve_ids) {
  data.validate();
  require(curve_ids.empty() ||
              int(curve_ids.size()) == data.curve_count(),
          ErrorCode::dimension_mismatch,
          "write_curve_csv: id count differs from curve count");
  std::ofstream outf(path, std::ios::binary);
  require(outf.good(), ErrorCode::io, "cannot write " + path);
  outf << "curve_id,time,value\n";
  char buf[80];
  for (int j = 0; j < data.curve_count(); ++j) {
    long id = curve_ids.empty() ? j + 1 : curve_ids[size_t(j)];
    const SampledCurve& c = data.curves[size_t(j)];
    for (int z = 0; z < c.size(); ++z) {
      // %.17g round-trips doubles exactly
      std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g\n", id,
                    c.times[size_t(z)], c.values[size_t(z)]);
      outf << buf;
    }
  }
  outf.flush();
  require(outf.good(), ErrorCode::io, "write failed for " + path);
}

}  // namespace pada
