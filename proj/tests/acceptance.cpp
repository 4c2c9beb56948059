// Acceptance gate. Runs each criterion and prints one PASS/FAIL line per
// criterion. With arguments, only the named criteria run (ids: 1 2a 2b 3 4
// 5 6 7 8). Exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dispersal/cli.hpp"
#include "dispersal/clustering.hpp"
#include "dispersal/dispersion.hpp"
#include "dispersal/distance_matrix.hpp"
#include "dispersal/error.hpp"
#include "dispersal/geometry.hpp"
#include "dispersal/io.hpp"
#include "dispersal/synth.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace {

using namespace dispersal;
using dispersal::testing::TempDir;

// Pinned constants.
constexpr std::uint64_t kToySeed = 7;
constexpr std::uint64_t kSweepSeed = 11;
constexpr std::uint64_t kMorphSeed = 5;
constexpr std::uint64_t kViewSeed = 9;
constexpr std::uint64_t kOracleDataSeed = 2023;
constexpr std::size_t kMorphShapes = 200;
constexpr std::size_t kMorphPoints = 500;
constexpr unsigned kWideThreads = 8;
constexpr double kToyRuntimeLimitS = 60.0;
constexpr double kMorphRuntimeLimitS = 300.0;
constexpr double kVcRuntimeLimitS = 600.0;
constexpr std::size_t kMaxMonotoneViolations = 3;
constexpr double kMaxViolationFraction = 0.02;
constexpr double kOracleGapFraction = 0.10;
constexpr int kOracleExactRequired = 90;
constexpr double kAxiomRelTol = 1e-9;
constexpr std::size_t kAxiomCases = 1000;
constexpr std::size_t kAPMaxIterations = 1000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) { return io::format_real(v); }

// ---- shared data, computed lazily ----

struct ToyCurves {
  std::vector<SweepCurve> curves;  // std 1..8
  double seconds = 0.0;
};

const ToyCurves& toy_curves() {
  static const ToyCurves cached = [] {
    ToyCurves out;
    const auto ks = kToySweep.values();
    const auto start = Clock::now();
    for (int std_dev = 1; std_dev <= 8; ++std_dev) {
      ToySpec spec;
      spec.cluster_std = std_dev;
      spec.seed = kToySeed;
      const auto data = gen_toy2d(spec);
      const auto d = pairwise_sqeuclidean(std::span<const Point2>(data.points), 1);
      out.curves.push_back(sweep(d, ks, ClusterMethod::kmedoids, kSweepSeed, 1));
    }
    out.seconds = seconds_since(start);
    return out;
  }();
  return cached;
}

DistanceMatrix toy_matrix(double std_dev, std::size_t clusters = 8, std::size_t points = 200) {
  ToySpec spec;
  spec.cluster_std = std_dev;
  spec.n_clusters = clusters;
  spec.n_points = points;
  spec.seed = kToySeed;
  const auto data = gen_toy2d(spec);
  return pairwise_sqeuclidean(std::span<const Point2>(data.points));
}

MorphSpec morph_spec() {
  MorphSpec spec;
  spec.n_shapes = kMorphShapes;
  spec.points_per_shape = kMorphPoints;
  spec.seed = kMorphSeed;
  return spec;
}

const std::vector<PointCloud>& morph_shapes() {
  static const std::vector<PointCloud> cached = gen_morph_dataset(morph_spec(), kWideThreads);
  return cached;
}

struct TimedMatrix {
  DistanceMatrix d{1};
  double seconds = 0.0;
};

const TimedMatrix& morph_matrix() {
  static const TimedMatrix cached = [] {
    const auto start = Clock::now();
    TimedMatrix out;
    out.d = pairwise_chamfer(std::span<const PointCloud>(morph_shapes()), kWideThreads);
    out.seconds = seconds_since(start);
    return out;
  }();
  return cached;
}

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> ks;
  for (std::size_t k = lo; k <= hi; ++k) ks.push_back(k);
  return ks;
}

// ---- criteria ----

Outcome toy_ordering() {
  const ToyCurves& toy = toy_curves();
  const auto& ks = toy.curves.front().ks;
  std::size_t order_breaks = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 8) continue;
    for (std::size_t s = 1; s < toy.curves.size(); ++s)
      if (!(toy.curves[s].scores[i] > toy.curves[s - 1].scores[i])) ++order_breaks;
  }
  std::size_t worst_violations = 0;
  double worst_fraction = 0.0;
  for (const auto& c : toy.curves) {
    std::size_t violations = 0;
    for (std::size_t i = 1; i < c.scores.size(); ++i) {
      if (c.scores[i] > c.scores[i - 1]) {
        ++violations;
        worst_fraction = std::max(worst_fraction, (c.scores[i] - c.scores[i - 1]) / c.scores[i - 1]);
      }
    }
    worst_violations = std::max(worst_violations, violations);
  }
  Outcome o;
  o.pass = order_breaks == 0 && worst_violations <= kMaxMonotoneViolations &&
           worst_fraction <= kMaxViolationFraction && toy.seconds <= kToyRuntimeLimitS;
  o.detail = "std-order breaks at k>=8: " + std::to_string(order_breaks) +
             "; max monotone violations per curve: " + std::to_string(worst_violations) +
             "; worst violation: " + fmt(worst_fraction * 100) + "%; runtime " + fmt(toy.seconds) + " s (limit " +
             fmt(kToyRuntimeLimitS) + ")";
  return o;
}

Outcome toy_elbows() {
  std::string elbows;
  bool pass = true;
  for (const auto& c : toy_curves().curves) {
    const std::size_t e = kneedle_elbow(c).elbow_k;
    pass = pass && e >= 6 && e <= 12;
    elbows += (elbows.empty() ? "" : ",") + std::to_string(e);
  }
  return {pass, "elbows for std 1..8: " + elbows + " (required in [6, 12])"};
}

Outcome morph_elbow() {
  const auto start = Clock::now();
  const TimedMatrix& m = morph_matrix();
  const auto ks = range(2, 20);
  const SweepCurve curve = sweep(m.d, ks, ClusterMethod::kmedoids, kSweepSeed, kWideThreads);
  std::optional<std::size_t> elbow;
  std::string note;
  try {
    elbow = kneedle_elbow(curve).elbow_k;
  } catch (const NoElbowError& e) {
    note = std::string(" (no elbow: ") + e.what() + ")";
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = elbow == 2u && secs <= kMorphRuntimeLimitS;
  o.detail = "elbow " + (elbow ? std::to_string(*elbow) : std::string("none")) + note + " (required 2); DS(2)=" +
             fmt(curve.scores.front()) + " DS(20)=" + fmt(curve.scores.back()) + "; runtime " + fmt(secs) + " s";
  return o;
}

Outcome pure_recognition() {
  // c distinct points (regular pentagon) each repeated m times. Groups stay
  // separate under affinity propagation for every preference as long as
  // m * (1 - s_between) > 1, which holds here (s_between ~ 0.38, m = 4).
  constexpr std::size_t c = 5, repeats = 4;
  const double pi = std::acos(-1.0);
  std::vector<Point2> pts;
  for (std::size_t r = 0; r < repeats; ++r)
    for (std::size_t j = 0; j < c; ++j)
      pts.push_back({std::cos(2 * pi * j / c), std::sin(2 * pi * j / c)});
  const DistanceMatrix d = pairwise_sqeuclidean(std::span<const Point2>(pts));

  const double km = dispersion_score(d, c, ClusterMethod::kmedoids, kSweepSeed).score;
  const double hc = dispersion_score(d, c, ClusterMethod::hierarchical, kSweepSeed).score;
  bool pass = km == 0.0 && hc == 0.0;
  std::string ap_detail;
  for (double q : {1.0, 4.0, 25.0, 50.0, 60.0, 75.0, 100.0}) {
    DispersionOptions opt;
    opt.ap.preference_percentile = q;
    opt.ap.max_iterations = kAPMaxIterations;
    const DispersionReport r = dispersion_score(d, 0, ClusterMethod::affinity_propagation, kSweepSeed, opt);
    pass = pass && r.inertia == 0.0;
    ap_detail += " q=" + fmt(q) + ":k=" + std::to_string(r.k) + ",inertia=" + fmt(r.inertia);
  }
  return {pass, "DS(kmedoids)=" + fmt(km) + " DS(hierarchical)=" + fmt(hc) + "; AP" + ap_detail};
}

Outcome oc_vs_vc() {
  const auto start = Clock::now();
  const DistanceMatrix& oc = morph_matrix().d;
  const auto vc_shapes = to_viewer_centered(std::span<const PointCloud>(morph_shapes()), 90.0, kViewSeed);
  const DistanceMatrix vc = pairwise_chamfer(std::span<const PointCloud>(vc_shapes), kWideThreads);
  const auto ks = range(2, 20);
  std::size_t breaks = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (ClusterMethod m : {ClusterMethod::kmedoids, ClusterMethod::hierarchical}) {
    const SweepCurve a = sweep(oc, ks, m, kSweepSeed, kWideThreads);
    const SweepCurve b = sweep(vc, ks, m, kSweepSeed, kWideThreads);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (!(b.scores[i] > a.scores[i])) ++breaks;
      min_ratio = std::min(min_ratio, b.scores[i] / a.scores[i]);
    }
  }
  const double secs = seconds_since(start) + morph_matrix().seconds;
  return {breaks == 0 && secs <= kVcRuntimeLimitS, "k in 2..20 where DS(VC) <= DS(OC): " + std::to_string(breaks) +
                                                       "; min DS(VC)/DS(OC) " + fmt(min_ratio) + "; runtime " +
                                                       fmt(secs) + " s"};
}

Outcome oracle_suites() {
  // (a) PAM vs brute force.
  std::mt19937_64 rng(kOracleDataSeed);
  int exact = 0, over = 0;
  double worst = 1.0;
  for (int run = 0; run < 100; ++run) {
    const std::size_t n = 4 + run % 9, k = 1 + run % 3;
    const auto pts = oracle::random_points(rng, n);
    const DistanceMatrix d = pairwise_sqeuclidean(std::span<const Point2>(pts));
    const double opt = brute_force_kmedoids(d, k).inertia;
    const double got = kmedoids(d, k, static_cast<std::uint64_t>(run)).inertia;
    if (got == opt) ++exact;
    if (got > opt * (1.0 + kOracleGapFraction)) ++over;
    if (opt > 0) worst = std::max(worst, got / opt);
  }
  const bool a = exact >= kOracleExactRequired && over == 0;

  // (b) Brute-force DS monotone in k.
  std::size_t b_breaks = 0;
  std::mt19937_64 rng_b(kOracleDataSeed + 1);
  for (int run = 0; run < 40; ++run) {
    const std::size_t n = 2 + run % 9;
    const auto pts = oracle::random_points(rng_b, n);
    const DistanceMatrix d = pairwise_sqeuclidean(std::span<const Point2>(pts));
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= n; ++k) {
      const double ds = brute_force_kmedoids(d, k).inertia / static_cast<double>(n);
      if (ds > prev) ++b_breaks;
      prev = ds;
    }
  }
  const bool b = b_breaks == 0;

  // (c) pairwise_matrix vs the naive loop, bitwise.
  std::size_t c_mismatch = 0;
  std::mt19937_64 rng_c(kOracleDataSeed + 2);
  for (std::size_t n = 1; n <= 20; ++n) {
    std::vector<PointCloud> clouds;
    for (std::size_t i = 0; i < n; ++i) clouds.push_back(oracle::random_cloud(rng_c, 40));
    const auto got = pairwise_chamfer(std::span<const PointCloud>(clouds), 3);
    const auto want = oracle::naive_matrix(clouds, [](const PointCloud& x, const PointCloud& y) {
      return chamfer_distance(x, y);
    });
    if (!std::equal(got.entries().begin(), got.entries().end(), want.begin(), want.end())) ++c_mismatch;
    const auto pts = oracle::random_points(rng_c, n, 5.0);
    const auto got2 = pairwise_sqeuclidean(std::span<const Point2>(pts), 2);
    const auto want2 = oracle::naive_matrix(pts, [](const Point2& x, const Point2& y) {
      return squared_euclidean(x, y);
    });
    if (!std::equal(got2.entries().begin(), got2.entries().end(), want2.begin(), want2.end())) ++c_mismatch;
  }
  const bool c = c_mismatch == 0;

  // (d) Parallel output bytes equal single-threaded bytes.
  std::mt19937_64 rng_d(kOracleDataSeed + 3);
  std::vector<PointCloud> clouds;
  for (int i = 0; i < 60; ++i) clouds.push_back(oracle::random_cloud(rng_d, 200));
  const auto serial = pairwise_chamfer(std::span<const PointCloud>(clouds), 1);
  bool d_ok = true;
  for (unsigned t : {2u, 4u, 8u}) {
    const auto par = pairwise_chamfer(std::span<const PointCloud>(clouds), t);
    for (auto f : {io::MatrixFormat::csv, io::MatrixFormat::binary})
      d_ok = d_ok && io::encode_matrix(par, f) == io::encode_matrix(serial, f);
  }

  auto mark = [](bool ok) { return ok ? "ok" : "FAIL"; };
  return {a && b && c && d_ok, std::string("(a) ") + mark(a) + " exact " + std::to_string(exact) + "/100, over 10%: " +
                                   std::to_string(over) + ", worst ratio " + fmt(worst) + "; (b) " + mark(b) +
                                   " increases " + std::to_string(b_breaks) + "; (c) " + mark(c) + " mismatches " +
                                   std::to_string(c_mismatch) + "; (d) " + mark(d_ok)};
}

bool rel_close(double a, double b) {
  return std::abs(a - b) <= kAxiomRelTol * std::max({std::abs(a), std::abs(b), 1e-300});
}

Outcome metric_axioms() {
  std::mt19937_64 rng(kOracleDataSeed + 4);
  std::uniform_real_distribution<double> az(-180.0, 180.0), el(-90.0, 90.0);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < kAxiomCases; ++i) {
    const PointCloud x = oracle::random_cloud(rng, 48), y = oracle::random_cloud(rng, 48);
    const double xy = chamfer_distance(x, y), yx = chamfer_distance(y, x);
    const Viewpoint v(az(rng), el(rng));
    const double rot = chamfer_distance(rotate_cloud(x, v), rotate_cloud(y, v));
    const auto p = oracle::random_points(rng, 2, 10.0);
    const double e_ab = squared_euclidean(p[0], p[1]), e_ba = squared_euclidean(p[1], p[0]);
    const bool ok = xy == yx && xy >= 0.0 && chamfer_distance(x, x) == 0.0 && rel_close(rot, xy) &&
                    e_ab == e_ba && e_ab >= 0.0 && squared_euclidean(p[0], p[0]) == 0.0;
    if (!ok) ++failures;
  }
  return {failures == 0, std::to_string(kAxiomCases - failures) + "/" + std::to_string(kAxiomCases) +
                             " cases pass (rotation tolerance " + fmt(kAxiomRelTol) + " relative)"};
}

std::vector<std::size_t> rank_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

Outcome ablation() {
  std::vector<double> km, hc;
  for (int s = 1; s <= 8; ++s) {
    const DistanceMatrix d = toy_matrix(s);
    km.push_back(dispersion_score(d, 8, ClusterMethod::kmedoids, kSweepSeed).score);
    hc.push_back(dispersion_score(d, 8, ClusterMethod::hierarchical, kSweepSeed).score);
  }
  const bool same_order = rank_order(km) == rank_order(hc);

  DispersionOptions opt;
  opt.ap.preference_percentile = kAPSyntheticPercentile;
  opt.ap.max_iterations = kAPMaxIterations;
  const DispersionReport two = dispersion_score(toy_matrix(1.0, 2, 100), 0, ClusterMethod::affinity_propagation,
                                                kSweepSeed, opt);
  const DispersionReport s1 = dispersion_score(toy_matrix(1.0), 0, ClusterMethod::affinity_propagation, kSweepSeed, opt);
  const DispersionReport s8 = dispersion_score(toy_matrix(8.0), 0, ClusterMethod::affinity_propagation, kSweepSeed, opt);
  const bool ap_ok = two.k == 2 && two.converged && s1.converged && s8.converged && s1.score < s8.score;

  std::string order;
  for (std::size_t i : rank_order(km)) order += std::to_string(i + 1);
  return {same_order && ap_ok,
          std::string("kmedoids/hierarchical std order at k=8 ") + (same_order ? "identical" : "DIFFERENT") + " (" +
              order + "); AP two-cluster k=" + std::to_string(two.k) + (two.converged ? "" : " (not converged)") +
              "; AP DS std1=" + fmt(s1.score) + " (k=" + std::to_string(s1.k) + ") std8=" + fmt(s8.score) +
              " (k=" + std::to_string(s8.k) + ")" + (s1.converged && s8.converged ? "" : " (not converged)")};
}

int cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[std::filesystem::relative(e.path(), root).string()] = io::read_text(e.path());
  return files;
}

Outcome cli_reproducibility() {
  TempDir tmp;
  auto session = [&](const std::string& tag) {
    const std::string r = (tmp / tag).string();
    std::vector<int> codes;
    codes.push_back(cli_run({"gen", "toy2d", "--std", "3", "--seed", "7", "--output", r + "/toy"}));
    codes.push_back(cli_run({"gen", "morph", "--shapes", "12", "--points", "80", "--seed", "7", "--viewer-centered",
                             "--alpha", "0,90", "--output", r + "/morph"}));
    codes.push_back(cli_run({"distmat", "--input", r + "/toy/toy2d.csv", "--output", r + "/toy.csv"}));
    codes.push_back(cli_run({"distmat", "--input", r + "/toy/toy2d.csv", "--format", "binary", "--threads", "3",
                             "--output", r + "/toy.bin"}));
    codes.push_back(cli_run({"distmat", "--input", r + "/morph", "--threads", "2", "--output",
                             r + "/morph.csv"}));
    codes.push_back(cli_run({"sweep", "--input", r + "/toy.bin", "--ks", "2:40:2", "--seed", "3", "--output",
                             r + "/sweep_km"}));
    codes.push_back(cli_run({"sweep", "--input", r + "/toy.csv", "--ks", "2:40:2", "--method", "hierarchical",
                             "--output", r + "/sweep_hc"}));
    codes.push_back(cli_run({"ds", "--input", r + "/toy.csv", "--k", "8", "--seed", "3", "--output",
                             r + "/ds_k.json"}));
    codes.push_back(cli_run({"ds", "--input", r + "/toy.csv", "--auto", "--ks", "2:40:2", "--seed", "3", "--output",
                             r + "/ds_auto.json"}));
    codes.push_back(cli_run({"ds", "--input", r + "/morph.csv", "--method", "ap", "--max-iter", "1000", "--seed",
                             "3", "--output", r + "/ds_ap.json"}));
    return codes;
  };
  const auto codes_a = session("a");
  const auto codes_b = session("b");
  const bool all_ok = std::all_of(codes_a.begin(), codes_a.end(), [](int c) { return c == 0; }) && codes_a == codes_b;
  const auto files_a = snapshot(tmp / "a"), files_b = snapshot(tmp / "b");
  const bool identical = files_a == files_b && !files_a.empty();

  // Exit-code contract.
  io::write_matrix(tmp / "zero.csv", DistanceMatrix(10), io::MatrixFormat::csv);
  io::write_text(tmp / "asym.csv", "0,1\n2,0\n");
  const std::string toy = (tmp / "a" / "toy.csv").string();
  const int usage = cli_run({"ds", "--input", toy, "--k", "0", "--stdout"});
  const int data = cli_run({"ds", "--input", (tmp / "asym.csv").string(), "--k", "1", "--stdout"});
  const int no_elbow = cli_run({"sweep", "--input", (tmp / "zero.csv").string(), "--ks", "1:10", "--output",
                                (tmp / "z").string()});
  const int degenerate = cli_run({"ds", "--input", (tmp / "zero.csv").string(), "--method", "ap", "--stdout"});
  const bool contract = usage == cli::kUsageError && data == cli::kDataError && no_elbow == cli::kNoElbow &&
                        degenerate == cli::kNumericalDegenerate;

  std::string code_list;
  for (int c : codes_a) code_list += std::to_string(c);
  return {all_ok && identical && contract,
          std::to_string(codes_a.size()) + " commands, exit codes " + code_list + ", " +
              std::to_string(files_a.size()) + " output files " + (identical ? "byte-identical" : "DIFFER") +
              "; error exits usage=" + std::to_string(usage) + " data=" + std::to_string(data) +
              " no-elbow=" + std::to_string(no_elbow) + " degenerate=" + std::to_string(degenerate)};
}

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"1", "toy dispersion ordering", toy_ordering},
      {"2a", "elbow recovery (toy)", toy_elbows},
      {"2b", "elbow recovery (morph)", morph_elbow},
      {"3", "pure-recognition limit", pure_recognition},
      {"4", "OC vs VC dominance", oc_vs_vc},
      {"5", "oracle suites", oracle_suites},
      {"6", "metric axioms", metric_axioms},
      {"7", "ablation concordance", ablation},
      {"8", "CLI reproducibility", cli_reproducibility},
  };
  std::set<std::string> selected(argv + 1, argv + argc);
  for (const auto& id : selected) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.id == id; })) {
      std::cerr << "unknown criterion: " << id << "\n";
      return 2;
    }
  }
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.title << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
