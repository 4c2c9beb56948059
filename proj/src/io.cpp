#include "dispersal/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dispersal/error.hpp"

namespace dispersal::io {

namespace {

constexpr char kMatrixMagic[4] = {'D', 'S', 'M', '1'};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    ++line_no;
    fn(line_no, text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
}

[[noreturn]] void fail_at(const fs::path& path, std::size_t line, const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw DataError("cannot format real");
  return std::string(buf, ptr);
}

double parse_real(std::string_view token) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || token.empty())
    throw DataError("'" + std::string(token) + "' is not a real number");
  if (!std::isfinite(value)) throw DataError("'" + std::string(token) + "' is not finite");
  return value;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

PointCloud read_cloud(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<Point3> points;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto tokens = split_whitespace(line);
    if (tokens.empty()) return;
    if (tokens.size() != 3) fail_at(path, line_no, "expected 3 coordinates, found " + std::to_string(tokens.size()));
    try {
      points.push_back({parse_real(tokens[0]), parse_real(tokens[1]), parse_real(tokens[2])});
    } catch (const DataError& e) {
      fail_at(path, line_no, e.what());
    }
  });
  if (points.empty()) throw DataError(path.string() + ": point cloud file has no points");
  return PointCloud(std::move(points));
}

void write_cloud(const fs::path& path, const PointCloud& cloud) {
  std::string text;
  text.reserve(cloud.size() * 64);
  for (const Point3& p : cloud.points()) {
    text += format_real(p.x);
    text += ' ';
    text += format_real(p.y);
    text += ' ';
    text += format_real(p.z);
    text += '\n';
  }
  write_text(path, text);
}

std::vector<PointCloud> read_cloud_set(const fs::path& dir) {
  const fs::path index = dir / kCloudIndexName;
  const std::string text = read_text(index);
  std::vector<PointCloud> clouds;
  for_each_line(text, [&](std::size_t, std::string_view line) {
    const auto name = trim(line);
    if (name.empty()) return;
    clouds.push_back(read_cloud(dir / std::string(name)));
  });
  if (clouds.empty()) throw DataError(index.string() + ": cloud set is empty");
  return clouds;
}

void write_cloud_set(const fs::path& dir, std::span<const PointCloud> clouds, std::vector<std::string>* names) {
  fs::create_directories(dir);
  const std::size_t width = std::max<std::size_t>(4, std::to_string(clouds.size()).size());
  std::string index;
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    std::string id = std::to_string(i);
    const std::string name = "shape_" + std::string(width - id.size(), '0') + id + ".xyz";
    write_cloud(dir / name, clouds[i]);
    index += name;
    index += '\n';
    if (names) names->push_back(name);
  }
  write_text(dir / kCloudIndexName, index);
}

std::vector<std::vector<double>> read_vector_csv(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<std::vector<double>> rows;
  bool drop_last = false;
  std::size_t width = 0;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (trim(line).empty()) return;
    auto cells = split_commas(line);
    if (rows.empty() && width == 0) {
      bool numeric = true;
      try {
        parse_real(cells.front());
      } catch (const DataError&) {
        numeric = false;
      }
      if (!numeric) {
        drop_last = cells.back() == "true_label";
        width = cells.size();
        return;
      }
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      fail_at(path, line_no, "expected " + std::to_string(width) + " columns, found " + std::to_string(cells.size()));
    if (drop_last) cells.pop_back();
    if (cells.empty()) fail_at(path, line_no, "row has no coordinates");
    std::vector<double> row;
    row.reserve(cells.size());
    try {
      for (auto c : cells) row.push_back(parse_real(c));
    } catch (const DataError& e) {
      fail_at(path, line_no, e.what());
    }
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw DataError(path.string() + ": no data rows");
  return rows;
}

void write_toy_csv(const fs::path& path, const LabeledToyDataset& data) {
  std::string text = "x,y,true_label\n";
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    text += format_real(data.points[i].x);
    text += ',';
    text += format_real(data.points[i].y);
    text += ',';
    text += std::to_string(data.true_labels[i]);
    text += '\n';
  }
  write_text(path, text);
}

MatrixFormat parse_matrix_format(std::string_view name) {
  if (name == "csv") return MatrixFormat::csv;
  if (name == "binary" || name == "binary-matrix" || name == "bin") return MatrixFormat::binary;
  throw InvalidArgument("unknown matrix format '" + std::string(name) + "'");
}

std::string encode_matrix(const DistanceMatrix& d, MatrixFormat format) {
  const std::size_t n = d.size();
  std::string out;
  if (format == MatrixFormat::binary) {
    out.reserve(12 + n * n * 8);
    out.append(kMatrixMagic, 4);
    put_u64_le(out, n);
    for (double v : d.entries()) put_u64_le(out, std::bit_cast<std::uint64_t>(v));
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = d.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out += ',';
      out += format_real(row[j]);
    }
    out += '\n';
  }
  return out;
}

void write_matrix(const fs::path& path, const DistanceMatrix& d, MatrixFormat format) {
  write_text(path, encode_matrix(d, format));
}

DistanceMatrix decode_matrix(std::string_view bytes, const std::string& source) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMatrixMagic, 4) == 0) {
    if (bytes.size() < 12) throw DataError(source + ": truncated binary matrix header");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint64_t n = get_u64_le(p + 4);
    if (n == 0 || n > (1ULL << 28) || (bytes.size() - 12) / 8 / n < n || bytes.size() != 12 + n * n * 8)
      throw DataError(source + ": binary matrix size does not match its header");
    std::vector<double> entries(n * n);
    for (std::size_t i = 0; i < entries.size(); ++i)
      entries[i] = std::bit_cast<double>(get_u64_le(p + 12 + 8 * i));
    try {
      return DistanceMatrix::from_entries(n, std::move(entries));
    } catch (const DataError& e) {
      throw DataError(source + ": " + e.what());
    }
  }

  std::vector<double> entries;
  std::size_t n = 0;
  std::size_t rows = 0;
  const fs::path path(source);
  for_each_line(bytes, [&](std::size_t line_no, std::string_view line) {
    if (trim(line).empty()) return;
    const auto cells = split_commas(line);
    if (n == 0) n = cells.size();
    if (cells.size() != n) fail_at(path, line_no, "expected " + std::to_string(n) + " columns");
    try {
      for (auto c : cells) entries.push_back(parse_real(c));
    } catch (const DataError& e) {
      fail_at(path, line_no, e.what());
    }
    ++rows;
  });
  if (n == 0) throw DataError(source + ": empty matrix file");
  if (rows != n) throw DataError(source + ": matrix has " + std::to_string(rows) + " rows but " + std::to_string(n) + " columns");
  try {
    return DistanceMatrix::from_entries(n, std::move(entries));
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

DistanceMatrix read_matrix(const fs::path& path) { return decode_matrix(read_text(path), path.string()); }

nlohmann::ordered_json to_json(const ClusteringResult& result) {
  nlohmann::ordered_json medoids = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < result.medoids.size(); ++c) medoids[std::to_string(c)] = result.medoids[c];
  return {{"method", to_string(result.method)}, {"k", result.k()},          {"labels", result.labels},
          {"medoids", medoids},                 {"inertia", result.inertia}, {"converged", result.converged}};
}

nlohmann::ordered_json to_json(const DispersionReport& report) {
  return {{"format", kFormatVersion}, {"method", to_string(report.method)}, {"k", report.k},
          {"n_items", report.n_items}, {"inertia", report.inertia},           {"score", report.score},
          {"seed", report.seed},       {"converged", report.converged}};
}

nlohmann::ordered_json to_json(const SweepCurve& curve) {
  return {{"format", kFormatVersion}, {"method", to_string(curve.method)}, {"seed", curve.seed},
          {"ks", curve.ks},            {"scores", curve.scores}};
}

nlohmann::ordered_json to_json(const ElbowReport& elbow) {
  return {{"format", kFormatVersion},
          {"elbow_k", elbow.elbow_k},
          {"normalized_distance", elbow.normalized_distance},
          {"curve", to_json(elbow.curve)}};
}

nlohmann::ordered_json to_json(const ToySpec& spec) {
  return {{"n_points", spec.n_points},
          {"n_clusters", spec.n_clusters},
          {"cluster_std", spec.cluster_std},
          {"box_half_width", spec.box_half_width},
          {"seed", spec.seed}};
}

nlohmann::ordered_json to_json(const MorphSpec& spec) {
  return {{"n_shapes", spec.n_shapes},
          {"points_per_shape", spec.points_per_shape},
          {"sphere_radius", spec.sphere_radius},
          {"cube_half_edge", spec.cube_half_edge},
          {"seed", spec.seed}};
}

std::string curve_csv(const SweepCurve& curve) {
  std::string text = "k,score\n";
  for (std::size_t i = 0; i < curve.ks.size(); ++i) {
    text += std::to_string(curve.ks[i]);
    text += ',';
    text += format_real(curve.scores[i]);
    text += '\n';
  }
  return text;
}

}  // namespace dispersal::io
