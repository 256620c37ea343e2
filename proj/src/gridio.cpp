#include "gridio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "error.hpp"

namespace convexsdp {

namespace {

std::string number17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double parse_double(std::string_view text, std::size_t line_no) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v))
    fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": malformed number '" + std::string(text) + "'");
  return v;
}

}  // namespace

void write_grid(const GridFunction& u, std::ostream& out) {
  const Grid& g = u.grid();
  for (int i = 0; i < g.dim(); ++i) out << 'x' << (i + 1) << ',';
  out << "value\n";
  for (std::int64_t k = 0; k < g.node_count(); ++k) {
    for (int i = 0; i < g.dim(); ++i) out << number17(g.coordinate(k, i)) << ',';
    out << number17(u[k]) << '\n';
  }
}

void write_grid(const GridFunction& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  write_grid(u, out);
  if (!out) fail(ErrorCode::io, "failed writing '" + path + "'");
}

GridFunction read_grid(std::istream& in, const std::optional<Grid>& expected) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::parse, "empty grid file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  const int dim = static_cast<int>(header.size()) - 1;
  if (dim < 1 || header.back() != "value") fail(ErrorCode::parse, "header must be x1,...,xd,value");
  for (int i = 0; i < dim; ++i)
    if (header[i] != "x" + std::to_string(i + 1)) fail(ErrorCode::parse, "header must be x1,...,xd,value");

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (static_cast<int>(fields.size()) != dim + 1)
      fail(ErrorCode::parse, "line " + std::to_string(line_no) + ": expected " + std::to_string(dim + 1) + " fields");
    std::vector<double> row;
    for (auto f : fields) row.push_back(parse_double(f, line_no));
    rows.push_back(std::move(row));
  }

  const auto count = static_cast<std::int64_t>(rows.size());
  int n = static_cast<int>(std::llround(std::pow(static_cast<double>(count), 1.0 / dim))) - 1;
  if (expected) {
    if (expected->dim() != dim) fail(ErrorCode::shape_mismatch, "grid file has the wrong dimension");
    n = expected->subdivisions();
  }
  if (n < 2) fail(ErrorCode::parse, "row count " + std::to_string(count) + " does not describe a grid");
  const Grid g(dim, n);
  if (g.node_count() != count)
    fail(ErrorCode::parse, "row count " + std::to_string(count) + " does not match a grid with " +
                               std::to_string(g.node_count()) + " nodes");

  std::vector<double> values(count);
  for (std::int64_t k = 0; k < count; ++k) {
    for (int i = 0; i < dim; ++i) {
      const double want = g.coordinate(k, i);
      if (std::abs(rows[k][i] - want) > 1e-12)
        fail(ErrorCode::parse, "row " + std::to_string(k + 1) + ": coordinate is not the expected grid point");
    }
    values[k] = rows[k][dim];
  }
  return GridFunction(g, std::move(values));
}

GridFunction read_grid(const std::string& path, const std::optional<Grid>& expected) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
  return read_grid(in, expected);
}

std::vector<double> default_contour_levels() {
  std::vector<double> levels{1e-7};
  for (int k = 1; k <= 11; ++k) levels.push_back(k / 10.0);
  return levels;
}

std::string contour_json(const GridFunction& u, const std::vector<double>& levels) {
  const Grid& g = u.grid();
  if (g.dim() != 2) fail(ErrorCode::invalid_argument, "contour export needs a 2D grid");
  const int samples = kContourRefinement * g.subdivisions() + 1;
  std::vector<double> axis(samples);
  for (int s = 0; s < samples; ++s) axis[s] = static_cast<double>(s) / (samples - 1);

  nlohmann::json values = nlohmann::json::array();
  for (int j = 0; j < samples; ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < samples; ++i) {
      const double p[2] = {axis[i], axis[j]};
      row.push_back(interpolate(u, p));
    }
    values.push_back(std::move(row));
  }
  nlohmann::json doc;
  doc["n"] = g.subdivisions();
  doc["refinement"] = kContourRefinement;
  doc["shape"] = {samples, samples};
  doc["x"] = axis;
  doc["y"] = axis;
  doc["values"] = std::move(values);  // values[j][i] = u(x[i], y[j])
  doc["levels"] = levels;
  return doc.dump(1);
}

void write_contours(const GridFunction& u, const std::vector<double>& levels, const std::string& path) {
  const std::string text = contour_json(u, levels);
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << text << '\n';
}

}  // namespace convexsdp
