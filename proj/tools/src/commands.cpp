#include "prony_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include <prony/prony.hpp>

#include "prony_cli/accuracy.hpp"
#include "prony_cli/manifest.hpp"

namespace prony::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t row_seed(std::uint64_t seed, std::uint64_t row) {
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (row + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(6) << v;
  return s.str();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double parse_double(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw UsageError("not a number: " + text);
    return v;
  } catch (const std::logic_error&) {
    throw UsageError("not a number: " + text);
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::optional<int> d, m;
  int n = 0;
  std::string family = "paper";
  std::string signal_file;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out_signal = "signal.json";
  std::string out_grid = "grid.bin";
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  std::optional<ExponentialSum> sum;
  if (a.family == "paper") {
    if (!a.d || !a.m) throw UsageError("--family paper needs --d and --m");
    if (!a.signal_file.empty()) throw UsageError("--signal-file only applies to --family file");
    sum = standard_test_family(*a.d, *a.m);
  } else {
    if (a.signal_file.empty()) throw UsageError("--family file needs --signal-file");
    sum = load_signal(a.signal_file);
    if ((a.d && *a.d != sum->dim()) || (a.m && *a.m != sum->terms())) {
      throw UsageError("--d/--m disagree with the signal file");
    }
  }
  if (!(a.noise >= 0.0)) throw UsageError("--noise must be >= 0");
  const SampleGrid grid = sample_grid(*sum, a.n, {a.noise, a.seed});

  const fs::path manifest_file = manifest_path_for(a.out_grid);
  nlohmann::json signal = signal_to_json(*sum);
  signal["manifest"] = manifest_file.filename().string();
  write_json(a.out_signal, signal);
  save_grid(grid, a.out_grid);

  RunManifest manifest;
  manifest.command = "generate";
  manifest.parameters = {{"d", sum->dim()}, {"m", sum->terms()}, {"n", a.n},        {"family", a.family},
                         {"noise", a.noise}, {"seed", a.seed},   {"signal_file", a.signal_file}};
  manifest.outputs = {a.out_signal, a.out_grid};
  manifest.save(manifest_file);
  out << "wrote " << a.out_signal << " and " << a.out_grid << " (" << grid.values().size() << " samples)\n";
  return kExitOk;
}

// ---------------------------------------------------------------- recover

struct RecoverArgs {
  std::string grid;
  std::string svd;
  std::string tol_mode = "machine";
  std::optional<double> tol;
  std::optional<double> noise_eps;
  std::string lanes = "parallel";
  int workers = 1;
  std::uint64_t seed = 0;
  std::optional<int> m;
  std::string assembly = "automatic";
  std::string out = "report.json";
  std::string timings_csv;
  bool no_diagnostics = false;
};

PipelineConfig make_config(const SampleGrid& grid, const RecoverArgs& a) {
  PipelineConfig cfg;
  cfg.n = grid.n();
  cfg.d = grid.dim();
  cfg.m_expected = a.m;
  if (!a.svd.empty()) cfg.svd_backend = parse_svd_backend(a.svd);
  if (a.tol_mode == "noise") {
    if (!a.tol) throw UsageError("--tol-mode noise needs --tol");
    cfg.rank_criterion = RankCriterion::noise(*a.tol);
  } else if (a.tol) {
    throw UsageError("--tol only applies to --tol-mode noise");
  }
  cfg.noise_epsilon = a.noise_eps;
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  cfg.lane_mode = parse_lane_mode(a.lanes);
  cfg.assembly = parse_assembly_mode(a.assembly);
  cfg.compute_diagnostics = !a.no_diagnostics;
  return cfg;
}

int cmd_recover(const RecoverArgs& a, std::ostream& out) {
  if (a.workers < 1) throw UsageError("--workers must be positive");
  const SampleGrid grid = load_grid(a.grid);
  const PipelineConfig cfg = make_config(grid, a);
  const RecoveryReport report = run_prony(grid, cfg);

  const fs::path manifest_file = manifest_path_for(a.out);
  nlohmann::json j = report_to_json(report);
  j["manifest"] = manifest_file.filename().string();
  write_json(a.out, j);
  RunManifest manifest;
  manifest.command = "recover";
  manifest.parameters = {{"grid", a.grid},   {"svd", std::string(to_string(report.backend))},
                         {"tol_mode", a.tol_mode}, {"tol", report.criterion.tol},
                         {"lanes", a.lanes}, {"seed", a.seed},
                         {"m", a.m ? nlohmann::json(*a.m) : nlohmann::json(nullptr)},
                         {"assembly", std::string(to_string(report.assembly))}};
  manifest.workers = a.workers;
  manifest.outputs = {a.out};
  if (!a.timings_csv.empty()) {
    auto csv = open_output(a.timings_csv);
    csv << csv_preamble(manifest_file) << '\n' << timings_csv_header() << '\n' << timings_csv_row(report.timings) << '\n';
    manifest.outputs.push_back(a.timings_csv);
  }
  manifest.save(manifest_file);

  out << "rank " << report.rank_detected << ", residual_rel " << sci(report.residual_rel) << ", backend "
      << to_string(report.backend) << ", t_total " << sci(report.timings.t_total) << " s\n";
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  return report.rank_anomaly() ? kExitRankAnomaly : kExitOk;
}

// ---------------------------------------------------------------- bench-svd

struct BenchArgs {
  std::string cases;
  int reps = 5;
  std::string backends = "dense,lanczos,power";
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out = "bench_svd.csv";
};

struct Case {
  int d, m, n;
};

std::vector<Case> parse_cases(const std::string& text) {
  std::vector<Case> cases;
  for (const auto& item : split(text, ';')) {
    const auto fields = split(item, ',');
    if (fields.size() != 3) throw UsageError("case '" + item + "' is not d,m,n");
    Case c{};
    try {
      c = {std::stoi(fields[0]), std::stoi(fields[1]), std::stoi(fields[2])};
    } catch (const std::logic_error&) {
      throw UsageError("case '" + item + "' is not d,m,n");
    }
    if (c.d < 1 || c.m < 1 || c.n < 1) throw UsageError("case '" + item + "' has non-positive entries");
    cases.push_back(c);
  }
  if (cases.empty()) throw UsageError("--cases is empty");
  return cases;
}

ReducedSVD run_backend(SvdBackend backend, const DenseMatrix& t, int m, std::uint64_t seed, const WorkerPool& pool) {
  const Index big_n = t.rows();
  const RankCriterion criterion = RankCriterion::machine(big_n);
  switch (backend) {
    case SvdBackend::dense: return dense_svd(t, criterion);
    case SvdBackend::lanczos:
      return lanczos_svd(t, random_complex_vector(big_n, row_seed(seed, 1)), criterion, {m, row_seed(seed, 2)}, &pool);
    case SvdBackend::power: {
      const int r0 = static_cast<int>(std::min<Index>(big_n, 2 * m));
      return power_svd(t, r0, random_orthonormal(big_n, r0, row_seed(seed, 3)),
                       random_orthonormal(big_n, r0, row_seed(seed, 4)), criterion, {}, &pool);
    }
  }
  throw InputError("unknown backend");
}

int cmd_bench_svd(const BenchArgs& a, std::ostream& out) {
  if (a.reps < 1) throw UsageError("--reps must be positive");
  const auto cases = parse_cases(a.cases);
  std::vector<SvdBackend> backends;
  for (const auto& name : split(a.backends, ',')) backends.push_back(parse_svd_backend(name));
  const WorkerPool pool(a.workers);
  const fs::path manifest_file = manifest_path_for(a.out);
  auto csv = open_output(a.out);
  csv << csv_preamble(manifest_file) << '\n' << "d,m,n,N,backend,rank,time_median_s,reps,sigma_rel_dev,status\n";

  for (const Case& c : cases) {
    const SampleGrid grid = sample_grid(standard_test_family(c.d, c.m), c.n, {});
    const IndexSet idx = index_set(c.n, c.d);
    const DenseMatrix t = build_T(grid, idx, &pool);
    std::optional<RealVector> reference;
    for (SvdBackend backend : backends) {
      std::ostringstream row;
      row << c.d << ',' << c.m << ',' << c.n << ',' << idx.size() << ',' << to_string(backend) << ',';
      try {
        ReducedSVD svd = run_backend(backend, t, c.m, a.seed, pool);  // warmup, discarded
        std::vector<double> times;
        for (int rep = 0; rep < a.reps; ++rep) {
          const auto start = std::chrono::steady_clock::now();
          svd = run_backend(backend, t, c.m, a.seed, pool);
          times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        }
        std::sort(times.begin(), times.end());
        const double median = times.size() % 2 ? times[times.size() / 2]
                                               : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
        if (!reference) reference = svd.sigma;
        double dev = std::numeric_limits<double>::quiet_NaN();
        if (reference->size() == svd.sigma.size() && svd.sigma.size() > 0) {
          dev = (svd.sigma - *reference).cwiseAbs().maxCoeff() / (*reference)(0);
        }
        row << svd.rank() << ',' << sci(median) << ',' << a.reps << ',' << sci(dev) << ",ok";
      } catch (const Error& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), ',', ';');
        row << ",,," << a.reps << ",," << "error: " << msg;
      }
      csv << row.str() << '\n';
      out << row.str() << '\n';
    }
  }

  RunManifest manifest;
  manifest.command = "bench-svd";
  manifest.parameters = {{"cases", a.cases}, {"reps", a.reps}, {"backends", a.backends}, {"seed", a.seed}};
  manifest.workers = a.workers;
  manifest.outputs = {a.out};
  manifest.save(manifest_file);
  return kExitOk;
}

// ---------------------------------------------------------------- accuracy-sweep

struct SweepArgs {
  std::string eps_list;
  std::string tol_list;
  int d = 0, m = 0, n = 0;
  std::string svd;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string lanes = "parallel";
  std::string out = "accuracy.csv";
};

int cmd_accuracy_sweep(const SweepArgs& a, std::ostream& out) {
  std::vector<double> eps;
  for (const auto& e : split(a.eps_list, ',')) eps.push_back(parse_double(e));
  if (eps.empty()) throw UsageError("--eps-list is empty");
  for (double e : eps) {
    if (!(e >= 0.0)) throw UsageError("noise levels must be >= 0");
  }
  std::vector<std::string> tols = split(a.tol_list, ',');
  if (tols.empty()) {
    for (double e : eps) tols.push_back(e == 0.0 ? "machine" : sci(e));
  }
  if (tols.size() == 1 && eps.size() > 1) tols.assign(eps.size(), tols[0]);
  if (tols.size() != eps.size()) throw UsageError("--tol-list must match --eps-list in length");

  const ExponentialSum truth = standard_test_family(a.d, a.m);
  const fs::path manifest_file = manifest_path_for(a.out);
  auto csv = open_output(a.out);
  csv << csv_preamble(manifest_file) << '\n'
      << "eps,tol_mode,tol,rank,residual_rel,max_t_error,rel_c_error,status\n";
  int exit_code = kExitOk;
  for (std::size_t row = 0; row < eps.size(); ++row) {
    PipelineConfig cfg;
    cfg.n = a.n;
    cfg.d = a.d;
    cfg.m_expected = a.m;
    if (!a.svd.empty()) cfg.svd_backend = parse_svd_backend(a.svd);
    const bool machine = tols[row] == "machine";
    if (!machine) cfg.rank_criterion = RankCriterion::noise(parse_double(tols[row]));
    cfg.noise_epsilon = eps[row];
    cfg.seed = a.seed;
    cfg.workers = a.workers;
    cfg.lane_mode = parse_lane_mode(a.lanes);
    const SampleGrid grid = sample_grid(truth, a.n, {eps[row], row_seed(a.seed, row)});

    std::ostringstream line;
    line << sci(eps[row]) << ',' << (machine ? "machine" : "noise") << ',';
    try {
      const RecoveryReport report = run_prony(grid, cfg);
      const Matching match = match_to_truth(report.t, report.c, truth);
      line << sci(report.criterion.tol) << ',' << report.rank_detected << ',' << sci(report.residual_rel) << ','
           << sci(match.max_t_error) << ',' << sci(match.rel_c_error) << ','
           << (report.rank_anomaly() ? "rank_anomaly" : "ok");
    } catch (const Error& e) {
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), ',', ';');
      line << ",,,,,error: " << msg;
      exit_code = kExitFailure;
    }
    csv << line.str() << '\n';
    out << line.str() << '\n';
  }

  RunManifest manifest;
  manifest.command = "accuracy-sweep";
  manifest.parameters = {{"eps_list", a.eps_list}, {"tol_list", a.tol_list}, {"d", a.d}, {"m", a.m},
                         {"n", a.n}, {"svd", a.svd}, {"seed", a.seed}, {"lanes", a.lanes}};
  manifest.workers = a.workers;
  manifest.outputs = {a.out};
  manifest.save(manifest_file);
  return exit_code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multivariate exponential-sum recovery by the matrix-pencil method", "prony"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Sample an exponential sum on the grid box");
  generate->add_option("--d", gen.d, "Dimension");
  generate->add_option("--m", gen.m, "Number of terms");
  generate->add_option("--n", gen.n, "Grid half-width")->required()->check(CLI::PositiveNumber);
  generate->add_option("--family", gen.family, "paper or file")->check(CLI::IsMember({"paper", "file"}));
  generate->add_option("--signal-file", gen.signal_file, "Signal definition JSON for --family file");
  generate->add_option("--noise", gen.noise, "Relative noise bound");
  generate->add_option("--seed", gen.seed, "Noise seed");
  generate->add_option("--out-signal", gen.out_signal, "Signal JSON output");
  generate->add_option("--out-grid", gen.out_grid, "Grid dump output");

  RecoverArgs rec;
  rec.workers = default_worker_count();
  auto* recover = app.add_subcommand("recover", "Recover parameters and coefficients from a grid dump");
  recover->add_option("--grid", rec.grid, "Grid dump")->required();
  recover->add_option("--svd", rec.svd, "dense, lanczos or power")->check(CLI::IsMember({"dense", "lanczos", "power"}));
  recover->add_option("--tol-mode", rec.tol_mode, "machine or noise")->check(CLI::IsMember({"machine", "noise"}));
  recover->add_option("--tol", rec.tol, "Rank tolerance for --tol-mode noise");
  recover->add_option("--noise-eps", rec.noise_eps, "Noise level assumed by the error bounds");
  recover->add_option("--lanes", rec.lanes, "parallel or sequential")->check(CLI::IsMember({"parallel", "sequential"}));
  recover->add_option("--workers", rec.workers, "Worker threads (default PRONY_WORKERS or hardware)");
  recover->add_option("--seed", rec.seed, "Seed for mu and iterative starts");
  recover->add_option("--m", rec.m, "Expected number of terms");
  recover->add_option("--assembly", rec.assembly, "automatic, materialized or streamed")
      ->check(CLI::IsMember({"automatic", "auto", "materialized", "streamed"}));
  recover->add_option("--out", rec.out, "Report JSON output");
  recover->add_option("--timings-csv", rec.timings_csv, "Stage timings CSV output");
  recover->add_flag("--no-diagnostics", rec.no_diagnostics, "Skip noise diagnostics");

  BenchArgs bench;
  bench.workers = default_worker_count();
  auto* bench_svd = app.add_subcommand("bench-svd", "Time the reduced SVD backends on the standard family");
  bench_svd->add_option("--cases", bench.cases, "Cases as d,m,n;d,m,n;...")->required();
  bench_svd->add_option("--reps", bench.reps, "Timed repetitions after one warmup");
  bench_svd->add_option("--backends", bench.backends, "Comma-separated backends");
  bench_svd->add_option("--seed", bench.seed, "Seed for iterative starts");
  bench_svd->add_option("--workers", bench.workers, "Worker threads");
  bench_svd->add_option("--out", bench.out, "CSV output");

  SweepArgs sweep;
  sweep.workers = default_worker_count();
  auto* accuracy = app.add_subcommand("accuracy-sweep", "Recovery errors across noise levels");
  accuracy->add_option("--eps-list", sweep.eps_list, "Comma-separated noise levels")->required();
  accuracy->add_option("--tol-list", sweep.tol_list, "Comma-separated tolerances or 'machine'");
  accuracy->add_option("--d", sweep.d, "Dimension")->required()->check(CLI::PositiveNumber);
  accuracy->add_option("--m", sweep.m, "Number of terms")->required()->check(CLI::PositiveNumber);
  accuracy->add_option("--n", sweep.n, "Grid half-width")->required()->check(CLI::PositiveNumber);
  accuracy->add_option("--svd", sweep.svd, "dense, lanczos or power")->check(CLI::IsMember({"dense", "lanczos", "power"}));
  accuracy->add_option("--seed", sweep.seed, "Base seed; rows derive their own");
  accuracy->add_option("--workers", sweep.workers, "Worker threads");
  accuracy->add_option("--lanes", sweep.lanes, "parallel or sequential")->check(CLI::IsMember({"parallel", "sequential"}));
  accuracy->add_option("--out", sweep.out, "CSV output");

  std::vector<std::string> argv_store{"prony"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(gen, out);
    if (*recover) return cmd_recover(rec, out);
    if (*bench_svd) return cmd_bench_svd(bench, out);
    if (*accuracy) return cmd_accuracy_sweep(sweep, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const RankOverflowError& e) {
    err << "rank failure: " << e.what() << '\n';
    return kExitRankAnomaly;
  } catch (const EmptyModelError& e) {
    err << "rank failure: " << e.what() << '\n';
    return kExitRankAnomaly;
  } catch (const RankDeficiencyError& e) {
    err << "rank failure: " << e.what() << '\n';
    return kExitRankAnomaly;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace prony::cli
