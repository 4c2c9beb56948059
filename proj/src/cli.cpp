#include "dispersal/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <filesystem>
#include <iostream>

#include "dispersal/distance_matrix.hpp"
#include "dispersal/error.hpp"

namespace dispersal::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw InvalidArgument("invalid " + what + " '" + text + "'");
  return value;
}

DistanceKind parse_distance(const std::string& name) {
  if (name == "sqeuclidean") return DistanceKind::sqeuclidean;
  if (name == "chamfer") return DistanceKind::chamfer;
  throw InvalidArgument("unknown distance '" + name + "'");
}

void emit(const RunConfig& config, std::ostream& out, const std::string& text) {
  if (config.to_stdout) out << text << (text.empty() || text.back() != '\n' ? "\n" : "");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string alpha_dir_name(double alpha) { return "vc_alpha_" + io::format_real(alpha); }

void run_gen_toy2d(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const LabeledToyDataset data = gen_toy2d(config.toy);
  const fs::path dir(config.output);
  io::write_toy_csv(dir / "toy2d.csv", data);
  json manifest = {{"format", io::kFormatVersion},
                   {"kind", "toy2d"},
                   {"spec", io::to_json(config.toy)},
                   {"files", {"toy2d.csv"}}};
  const std::string text = dump(manifest);
  io::write_text(dir / io::kManifestName, text);
  err << "gen toy2d: " << data.points.size() << " points -> " << dir.string() << "\n";
  emit(config, out, text);
}

void run_gen_morph(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const unsigned threads = resolve_threads(config.threads);
  const std::vector<PointCloud> shapes = gen_morph_dataset(config.morph, threads);
  const fs::path dir(config.output);
  std::vector<std::string> names;
  io::write_cloud_set(dir, shapes, &names);

  json listed = json::array();
  for (std::size_t i = 0; i < names.size(); ++i)
    listed.push_back({{"file", names[i]}, {"t", morph_parameter(i, shapes.size())}});
  json manifest = {{"format", io::kFormatVersion},
                   {"kind", "morph"},
                   {"spec", io::to_json(config.morph)},
                   {"index", io::kCloudIndexName},
                   {"shapes", listed}};

  if (config.viewer_centered) {
    json views = json::array();
    for (double alpha : config.alphas) {
      const std::vector<PointCloud> vc = to_viewer_centered(shapes, alpha, config.morph.seed);
      const std::string sub = alpha_dir_name(alpha);
      io::write_cloud_set(dir / sub, vc);
      views.push_back({{"alpha_deg", alpha}, {"dir", sub}});
    }
    manifest["viewer_centered"] = views;
  }
  const std::string text = dump(manifest);
  io::write_text(dir / io::kManifestName, text);
  err << "gen morph: " << shapes.size() << " shapes x " << config.morph.points_per_shape << " points -> "
      << dir.string() << "\n";
  emit(config, out, text);
}

void run_distmat(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.inputs.empty()) throw InvalidArgument("distmat: --input is required");
  const auto started = std::chrono::steady_clock::now();
  const unsigned threads = resolve_threads(config.threads);

  // Item type: one CSV of vectors, a cloud-set directory, or cloud files.
  const fs::path first(config.inputs.front());
  const bool vectors = config.inputs.size() == 1 && first.extension() == ".csv";
  const DistanceKind distance =
      config.distance == DistanceKind::auto_detect ? (vectors ? DistanceKind::sqeuclidean : DistanceKind::chamfer)
                                                   : config.distance;
  if (vectors != (distance == DistanceKind::sqeuclidean))
    throw InvalidArgument(vectors ? "distmat: chamfer distance needs point-cloud inputs"
                                  : "distmat: sqeuclidean distance needs a CSV of vectors");

  std::optional<DistanceMatrix> matrix;
  if (vectors) {
    const auto rows = io::read_vector_csv(first);
    matrix.emplace(pairwise_sqeuclidean(std::span<const std::vector<double>>(rows), threads));
  } else {
    std::vector<PointCloud> clouds;
    if (config.inputs.size() == 1 && fs::is_directory(first)) {
      clouds = io::read_cloud_set(first);
    } else {
      for (const auto& path : config.inputs) clouds.push_back(io::read_cloud(path));
    }
    matrix.emplace(pairwise_chamfer(clouds, threads));
  }

  if (!config.output.empty()) io::write_matrix(config.output, *matrix, config.format);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  err << "distmat: n=" << matrix->size() << " wall=" << seconds << "s threads=" << threads << "\n";
  if (config.to_stdout) out << io::encode_matrix(*matrix, io::MatrixFormat::csv);
}

void run_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.inputs.size() != 1) throw InvalidArgument("sweep: exactly one --input matrix is required");
  const DistanceMatrix d = io::read_matrix(config.inputs.front());
  const auto ks = config.ks.values();
  const SweepCurve curve = sweep(d, ks, config.method, config.seed, resolve_threads(config.threads));

  const fs::path dir(config.output);
  if (!config.output.empty()) {
    io::write_text(dir / "curve.csv", io::curve_csv(curve));
    io::write_text(dir / "curve.json", dump(io::to_json(curve)));
  }
  const ElbowReport elbow = kneedle_elbow(curve);
  const std::string text = dump(io::to_json(elbow));
  if (!config.output.empty()) io::write_text(dir / "elbow.json", text);
  err << "sweep: n=" << d.size() << " points=" << curve.ks.size() << " elbow_k=" << elbow.elbow_k << "\n";
  emit(config, out, text);
}

void run_ds(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.inputs.size() != 1) throw InvalidArgument("ds: exactly one --input matrix is required");
  const DistanceMatrix d = io::read_matrix(config.inputs.front());
  DispersionOptions options;
  options.ap = config.ap;

  json report;
  if (config.auto_k) {
    const auto ks = config.ks.values();
    const AutoDispersion result =
        auto_ds(d, ks, config.method, config.seed, resolve_threads(config.threads), options);
    report = io::to_json(result.report);
    report["auto"] = true;
    if (result.elbow) {
      report["elbow_k"] = result.elbow->elbow_k;
      report["sweep"] = io::to_json(result.elbow->curve);
      report["normalized_distance"] = result.elbow->normalized_distance;
    }
  } else {
    if (!config.k && config.method != ClusterMethod::affinity_propagation)
      throw InvalidArgument("ds: pass --k or --auto");
    report = io::to_json(dispersion_score(d, config.k.value_or(0), config.method, config.seed, options));
    report["auto"] = false;
  }
  const std::string text = dump(report);
  if (!config.output.empty()) io::write_text(config.output, text);
  err << "ds: n=" << d.size() << " k=" << report["k"].get<std::size_t>()
      << " score=" << io::format_real(report["score"].get<double>()) << "\n";
  emit(config, out, text);
}

}  // namespace

KRange parse_k_range(const std::string& text) {
  KRange range;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    range.start = parse_count(text.substr(0, dots), "k range start");
    range.stop = parse_count(text.substr(dots + 2), "k range stop");
    range.step = 1;
  } else {
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) throw InvalidArgument("k range must look like start:stop[:step] or start..stop");
    const auto c2 = text.find(':', c1 + 1);
    range.start = parse_count(text.substr(0, c1), "k range start");
    range.stop = parse_count(text.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1),
                             "k range stop");
    range.step = c2 == std::string::npos ? 1 : parse_count(text.substr(c2 + 1), "k range step");
  }
  range.values();  // validates
  return range;
}

std::optional<RunConfig> parse(const std::vector<std::string>& args, std::ostream& out) {
  RunConfig config;
  CLI::App app{"Dispersion score toolkit: dataset generators, distance matrices, clustering sweeps"};
  app.require_subcommand(1);

  std::string method = "kmedoids", distance, ks, format = "csv";
  std::size_t k = 0;
  unsigned threads = 0;
  std::vector<std::string> inputs;

  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", config.seed, "RNG seed")->capture_default_str(); };
  auto add_output = [&](CLI::App* sub, const char* help) { return sub->add_option("--output,-o", config.output, help); };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--threads", threads, "worker cap (default: DISPERSAL_THREADS, then all cores)");
    sub->add_flag("--stdout", config.to_stdout, "also print the machine-readable result on stdout");
  };
  auto add_method = [&](CLI::App* sub) {
    sub->add_option("--method", method, "kmedoids | hierarchical | ap")->capture_default_str();
    sub->add_option("--ks", ks, "cluster-count sweep start:stop:step (default 2:100:2)");
    sub->add_option("--q", config.ap.preference_percentile, "affinity propagation preference percentile")
        ->capture_default_str();
    sub->add_option("--damping", config.ap.damping, "affinity propagation damping")->capture_default_str();
    sub->add_option("--max-iter", config.ap.max_iterations, "affinity propagation iteration cap")
        ->capture_default_str();
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  gen->require_subcommand(1);
  CLI::App* toy = gen->add_subcommand("toy2d", "2D Gaussian-cluster toy dataset (CSV x,y,true_label)");
  toy->add_option("--points", config.toy.n_points)->capture_default_str();
  toy->add_option("--clusters", config.toy.n_clusters)->capture_default_str();
  toy->add_option("--std", config.toy.cluster_std)->capture_default_str();
  toy->add_option("--box", config.toy.box_half_width, "half width of the centre box")->capture_default_str();
  add_seed(toy);
  add_output(toy, "output directory")->required();
  add_common(toy);

  CLI::App* morph = gen->add_subcommand("morph", "sphere-to-cube morph point clouds");
  morph->add_option("--shapes", config.morph.n_shapes)->capture_default_str();
  morph->add_option("--points", config.morph.points_per_shape)->capture_default_str();
  morph->add_option("--radius", config.morph.sphere_radius)->capture_default_str();
  morph->add_option("--half-edge", config.morph.cube_half_edge)->capture_default_str();
  morph->add_flag("--viewer-centered", config.viewer_centered, "also write rotated copies per azimuth bound");
  morph->add_option("--alpha", config.alphas, "azimuth bounds in degrees (default 0,15,...,90)")->delimiter(',');
  add_seed(morph);
  add_output(morph, "output directory")->required();
  add_common(morph);

  CLI::App* distmat = app.add_subcommand("distmat", "pairwise distance matrix");
  distmat->add_option("--input,-i", inputs, "CSV of vectors, cloud-set directory, or cloud files")->required();
  distmat->add_option("--distance", distance, "sqeuclidean | chamfer (default from input type)");
  distmat->add_option("--format", format, "csv | binary")->capture_default_str();
  add_output(distmat, "matrix file");
  add_common(distmat);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "dispersion score over a range of cluster counts");
  sweep_cmd->add_option("--input,-i", inputs, "distance matrix file")->required();
  add_method(sweep_cmd);
  add_seed(sweep_cmd);
  add_output(sweep_cmd, "output directory (curve.csv, curve.json, elbow.json)");
  add_common(sweep_cmd);

  CLI::App* ds = app.add_subcommand("ds", "dispersion score at one cluster count or at the elbow");
  ds->add_option("--input,-i", inputs, "distance matrix file")->required();
  auto* k_opt = ds->add_option("--k", k, "cluster count");
  auto* auto_opt = ds->add_flag("--auto", config.auto_k, "sweep and evaluate at the Kneedle elbow");
  k_opt->excludes(auto_opt);
  add_method(ds);
  add_seed(ds);
  add_output(ds, "report JSON file");
  add_common(ds);

  std::vector<const char*> argv{"dispersal"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw InvalidArgument(e.what());
  }

  if (toy->parsed()) config.command = Command::gen_toy2d;
  else if (morph->parsed()) config.command = Command::gen_morph;
  else if (distmat->parsed()) config.command = Command::distmat;
  else if (sweep_cmd->parsed()) config.command = Command::sweep;
  else config.command = Command::ds;

  config.inputs = inputs;
  config.toy.seed = config.seed;
  config.morph.seed = config.seed;
  config.method = parse_cluster_method(method);
  if (!distance.empty()) config.distance = parse_distance(distance);
  if (!ks.empty()) config.ks = parse_k_range(ks);
  config.format = io::parse_matrix_format(format);
  if (threads > 0) config.threads = threads;
  if (k_opt->count() > 0) config.k = k;

  if (config.command == Command::gen_toy2d) config.toy.validate();
  if (config.command == Command::gen_morph) {
    config.morph.validate();
    for (double a : config.alphas)
      if (!(a >= 0.0 && a <= 180.0)) throw InvalidArgument("--alpha values must be in [0, 180]");
  }
  if (config.method == ClusterMethod::affinity_propagation) config.ap.validate();
  if ((config.command == Command::sweep || config.command == Command::ds) && config.output.empty() &&
      !config.to_stdout)
    throw InvalidArgument("pass --output and/or --stdout");
  if (config.command == Command::distmat && config.output.empty() && !config.to_stdout)
    throw InvalidArgument("pass --output and/or --stdout");
  return config;
}

void execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.command) {
    case Command::gen_toy2d: return run_gen_toy2d(config, out, err);
    case Command::gen_morph: return run_gen_morph(config, out, err);
    case Command::distmat: return run_distmat(config, out, err);
    case Command::sweep: return run_sweep(config, out, err);
    case Command::ds: return run_ds(config, out, err);
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const auto config = parse(args, out);
    if (!config) return kSuccess;
    execute(*config, out, err);
    return kSuccess;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const NoElbowError& e) {
    err << "error: " << e.what() << "\n";
    return kNoElbow;
  } catch (const DegenerateMatrixError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalDegenerate;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace dispersal::cli
