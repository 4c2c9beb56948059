#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dispersal/clustering.hpp"
#include "dispersal/dispersion.hpp"
#include "dispersal/distance_matrix.hpp"
#include "dispersal/geometry.hpp"
#include "dispersal/synth.hpp"

namespace dispersal::io {

namespace fs = std::filesystem;

inline constexpr std::string_view kFormatVersion = "dispersal/1";
inline constexpr std::string_view kCloudIndexName = "index.txt";
inline constexpr std::string_view kManifestName = "manifest.json";

/// Shortest decimal string that parses back to the same double.
std::string format_real(double value);

/// Strict parse of a whole token as a finite double.
double parse_real(std::string_view token);

// Point clouds: one "x y z" per line, blank lines ignored. Read errors are
// DataError and name the file and line.
PointCloud read_cloud(const fs::path& path);
void write_cloud(const fs::path& path, const PointCloud& cloud);

/// Cloud set: a directory with an index file listing cloud filenames in order.
std::vector<PointCloud> read_cloud_set(const fs::path& dir);
void write_cloud_set(const fs::path& dir, std::span<const PointCloud> clouds,
                     std::vector<std::string>* names = nullptr);

// Real-valued rows (one item per line, comma separated). A non-numeric first
// line is treated as a header; a trailing "true_label" column is dropped.
std::vector<std::vector<double>> read_vector_csv(const fs::path& path);

void write_toy_csv(const fs::path& path, const LabeledToyDataset& data);

enum class MatrixFormat { csv, binary };

MatrixFormat parse_matrix_format(std::string_view name);

/// CSV: n lines of n comma-separated reals. Binary: "DSM1", u64 n, n*n f64,
/// all little-endian, row-major.
void write_matrix(const fs::path& path, const DistanceMatrix& d, MatrixFormat format);
std::string encode_matrix(const DistanceMatrix& d, MatrixFormat format);

/// Detects the format from the magic bytes.
DistanceMatrix read_matrix(const fs::path& path);
DistanceMatrix decode_matrix(std::string_view bytes, const std::string& source = "<memory>");

nlohmann::ordered_json to_json(const ClusteringResult& result);
nlohmann::ordered_json to_json(const DispersionReport& report);
nlohmann::ordered_json to_json(const SweepCurve& curve);
nlohmann::ordered_json to_json(const ElbowReport& elbow);
nlohmann::ordered_json to_json(const ToySpec& spec);
nlohmann::ordered_json to_json(const MorphSpec& spec);

/// Two-column "k,score" CSV with a header line.
std::string curve_csv(const SweepCurve& curve);

/// Writes text atomically enough for a CLI: truncates, throws DataError on failure.
void write_text(const fs::path& path, std::string_view text);
std::string read_text(const fs::path& path);

}  // namespace dispersal::io
