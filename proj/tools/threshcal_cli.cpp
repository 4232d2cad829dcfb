#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "threshcal/calibrator.hpp"
#include "threshcal/io.hpp"
#include "threshcal/merge_tree.hpp"
#include "threshcal/rng.hpp"
#include "threshcal/solvers.hpp"

namespace {

using namespace threshcal;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInputError = 2;

struct FitOptions {
  std::string input;
  std::string loss;  // empty = infer from the input schema
  double alpha = 1.0;
  double q0 = 0.0;
  double q1 = 1.0;
  std::string algorithm = "merger";
  std::string output = "json";
};

void add_fit_options(CLI::App* cmd, FitOptions& opt, bool with_algorithm) {
  cmd->add_option("--input", opt.input, "input file (CSV with header x,y[,w] or x,z, or JSONL)")
      ->required();
  cmd->add_option("--loss", opt.loss, "loss mode: plain, class, sample or raw (default: inferred)")
      ->check(CLI::IsMember({"plain", "class", "sample", "raw"}));
  cmd->add_option("--alpha", opt.alpha, "class-1 error weight (class/sample losses)");
  cmd->add_option("--q0", opt.q0, "lower mapped value (default 0)");
  cmd->add_option("--q1", opt.q1, "upper mapped value (default 1)");
  if (with_algorithm) {
    cmd->add_option("--algorithm", opt.algorithm, "brute, iterative or merger (default merger)")
        ->check(CLI::IsMember({"brute", "iterative", "merger"}));
  }
  cmd->add_option("--output", opt.output, "output format: json or csv (default json)")
      ->check(CLI::IsMember({"json", "csv"}));
}

LossSpec resolve_spec(const CLI::App* cmd, const FitOptions& opt, io::InputSchema schema) {
  const bool alpha_given = cmd->count("--alpha") > 0;
  std::string name = opt.loss;
  if (name.empty()) name = schema == io::InputSchema::kRaw ? "raw" : "plain";
  const LossMode mode = loss_mode_from_string(name);

  if (mode == LossMode::kRaw && schema != io::InputSchema::kRaw)
    throw std::invalid_argument("--loss raw needs x,z input");
  if (mode != LossMode::kRaw && schema != io::InputSchema::kLabeled)
    throw std::invalid_argument("--loss " + name + " needs labeled x,y[,w] input");
  if (alpha_given && mode == LossMode::kRaw)
    throw std::invalid_argument("--alpha cannot be combined with --loss raw");
  if (alpha_given && mode == LossMode::kPlain)
    throw std::invalid_argument("--alpha needs --loss class or --loss sample");
  return LossSpec(mode, mode == LossMode::kPlain || mode == LossMode::kRaw ? 1.0 : opt.alpha);
}

std::string endpoint_json(Real v) {
  if (is_low(v) || is_high(v)) return "null";
  return io::format_number(v);
}

std::string solution_json(const ThresholdSolution& s, const std::string& algorithm) {
  std::string out = "{\"x0\":" + endpoint_json(s.x0);
  out += ",\"x1\":" + endpoint_json(s.x1);
  out += ",\"l0\":" + io::format_number(s.l0);
  out += ",\"l1\":" + io::format_number(s.l1);
  out += ",\"loss\":" + io::format_number(s.loss);
  out += ",\"n\":" + std::to_string(s.n);
  out += ",\"algorithm\":\"" + algorithm + "\"}";
  return out;
}

std::string solution_csv(const ThresholdSolution& s, const std::string& algorithm) {
  std::string out = "x0,x1,l0,l1,loss,n,algorithm\n";
  out += io::format_endpoint(s.x0) + "," + io::format_endpoint(s.x1) + "," +
         io::format_number(s.l0) + "," + io::format_number(s.l1) + "," +
         io::format_number(s.loss) + "," + std::to_string(s.n) + "," + algorithm + "\n";
  return out;
}

std::vector<Sample> reduce_records(const io::InputData& data, const LossSpec& spec) {
  std::vector<Sample> samples;
  samples.reserve(data.records.size());
  for (const io::InputRecord& rec : data.records) {
    if (spec.mode == LossMode::kRaw)
      samples.emplace_back(rec.x, rec.z);
    else
      samples.push_back(
          reduce_to_linear(LabeledObservation(rec.x, static_cast<int>(rec.y), rec.w), spec));
  }
  return samples;
}

int cmd_fit(const CLI::App* cmd, const FitOptions& opt) {
  const io::InputData data = io::read_records_file(opt.input);
  if (data.records.empty()) {
    std::cerr << "error: " << opt.input << ": empty instance\n";
    return kExitInputError;
  }
  const LossSpec spec = resolve_spec(cmd, opt, *data.schema);
  const MappingBounds bounds(opt.q0, opt.q1);
  const SortedInstance inst = SortedInstance::from_unsorted(reduce_records(data, spec), bounds);

  ThresholdSolution sol;
  if (opt.algorithm == "brute")
    sol = solve_brute_force(inst);
  else if (opt.algorithm == "iterative")
    sol = solve_iterative(inst);
  else
    sol = batch_build(inst).root_solution(bounds);

  std::cout << (opt.output == "csv" ? solution_csv(sol, opt.algorithm)
                                    : solution_json(sol, opt.algorithm) + "\n");
  return kExitOk;
}

void write_snapshot(const Calibrator& cal, const std::string& path) {
  const std::vector<std::uint8_t> bytes = cal.snapshot();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path + ": cannot open snapshot file");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(path + ": snapshot write failed");
}

int cmd_stream(const CLI::App* cmd, const FitOptions& opt, bool trace,
               const std::string& snapshot_path, std::size_t snapshot_every) {
  const io::InputData data = io::read_records_file(opt.input);
  if (data.records.empty()) {
    std::cerr << "warning: " << opt.input << ": no records, nothing to do\n";
    return kExitOk;
  }
  const LossSpec spec = resolve_spec(cmd, opt, *data.schema);
  const MappingBounds bounds(opt.q0, opt.q1);

  Calibrator cal(spec, bounds);
  if (trace) std::cout << "n,x,z,x0,x1,l0,l1,loss,updates\n";
  std::size_t n = 0;
  for (const io::InputRecord& rec : data.records) {
    ThresholdSolution sol;
    Real z;
    if (spec.mode == LossMode::kRaw) {
      z = rec.z;
      sol = cal.observe(Sample(rec.x, rec.z));
    } else {
      const LabeledObservation obs(rec.x, static_cast<int>(rec.y), rec.w);
      z = reduce_to_linear(obs, spec).z;
      sol = cal.observe(obs);
    }
    ++n;
    if (trace) {
      std::cout << n << "," << io::format_number(rec.x) << "," << io::format_number(z) << ","
                << io::format_endpoint(sol.x0) << "," << io::format_endpoint(sol.x1) << ","
                << io::format_number(sol.l0) << "," << io::format_number(sol.l1) << ","
                << io::format_number(sol.loss) << "," << cal.last_update_count() << "\n";
    }
    if (!snapshot_path.empty() && snapshot_every > 0 && n % snapshot_every == 0)
      write_snapshot(cal, snapshot_path);
  }
  if (!snapshot_path.empty()) write_snapshot(cal, snapshot_path);

  const ThresholdSolution sol = cal.solution();
  std::cout << (opt.output == "csv" ? solution_csv(sol, "merger")
                                    : solution_json(sol, "merger") + "\n");
  return kExitOk;
}

int cmd_verify(std::size_t max_n, std::size_t grid, std::size_t trials, std::uint64_t seed) {
  if (monotone_assignment_count(max_n, grid) > kEnumerationGuard) {
    std::cerr << "error: enumeration guard exceeded for max-n=" << max_n << " grid=" << grid
              << "\n";
    return kExitInputError;
  }
  SplitMix64 rng(seed);
  std::size_t failed = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.range(1, static_cast<std::int64_t>(max_n)));
    std::vector<Sample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      samples.emplace_back(static_cast<Real>(i + 1), static_cast<Real>(rng.range(-10, 10)));
    const SortedInstance inst(std::move(samples),
                              MappingBounds(0, static_cast<Real>(grid - 1)));
    const OptimalityReport report = verify_threshold_optimality(inst, grid);
    if (!report.threshold_is_optimal) {
      ++failed;
      std::cout << "counterexample at trial " << t
                << ": threshold_loss=" << io::format_number(report.threshold_loss)
                << " best_grid_loss=" << io::format_number(report.best_grid_loss) << " witness=";
      for (std::size_t i = 0; i < report.witness.size(); ++i)
        std::cout << (i ? " " : "") << io::format_number(report.witness[i]);
      std::cout << "\n";
    }
  }
  std::cout << "trials=" << trials << " max_n=" << max_n << " grid=" << grid
            << " passed=" << trials - failed << " failed=" << failed << "\n"
            << (failed == 0 ? "PASS" : "FAIL") << "\n";
  return failed == 0 ? kExitOk : kExitVerifyFailed;
}

int cmd_bench(std::size_t max_n, std::uint64_t seed, const std::string& report_path) {
  MergeTree tree;
  SplitMix64 rng(seed);
  std::string csv = "N,mean_updates,max_depth,log2N\n";
  std::size_t next_checkpoint = max_n < 1024 ? max_n : 1024;
  for (std::size_t i = 1; i <= max_n; ++i) {
    Real x = rng.real01();
    while (tree.contains(x)) x = rng.real01();
    tree.insert(Sample(x, static_cast<Real>(rng.range(-10, 10))));
    if (i == next_checkpoint) {
      const Real mean = static_cast<Real>(tree.update_counter()) / static_cast<Real>(i);
      csv += std::to_string(i) + "," + io::format_number(mean) + "," +
             std::to_string(tree.depth()) + "," +
             io::format_number(std::log2(static_cast<Real>(i))) + "\n";
      next_checkpoint *= 2;
    }
  }
  if (report_path.empty() || report_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(report_path, std::ios::trunc);
    if (!out) throw std::runtime_error(report_path + ": cannot open report file");
    out << csv;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal threshold calibration for binary-classification scores"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  CLI::App* fit = app.add_subcommand("fit", "solve one batch instance");
  add_fit_options(fit, fit_opt, true);

  FitOptions stream_opt;
  bool trace = false;
  std::string snapshot_path;
  std::size_t snapshot_every = 0;
  CLI::App* stream = app.add_subcommand("stream", "calibrate sequentially in file order");
  add_fit_options(stream, stream_opt, false);
  stream->add_flag("--trace", trace, "print one line per observation");
  stream->add_option("--snapshot", snapshot_path, "write a state snapshot to this path");
  stream->add_option("--snapshot-every", snapshot_every,
                     "also snapshot every K observations (default: final only)");

  std::size_t verify_max_n = 7, verify_grid = 5, verify_trials = 100;
  std::uint64_t verify_seed = 0;
  CLI::App* verify = app.add_subcommand("verify", "randomized exhaustive optimality check");
  verify->add_option("--max-n", verify_max_n, "largest instance size (default 7)");
  verify->add_option("--grid", verify_grid, "monotone grid levels (default 5)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{64}));
  verify->add_option("--trials", verify_trials, "number of random instances (default 100)");
  verify->add_option("--seed", verify_seed, "RNG seed (default 0)");

  std::size_t bench_n = 1 << 16;
  std::uint64_t bench_seed = 0;
  std::string bench_report = "-";
  CLI::App* bench = app.add_subcommand("bench", "sequential-update complexity report");
  bench->add_option("--n", bench_n, "stream length, ideally a power of two (default 65536)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "RNG seed (default 0)");
  bench->add_option("--report", bench_report, "CSV output path, - for stdout (default -)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit, fit_opt);
    if (stream->parsed()) return cmd_stream(stream, stream_opt, trace, snapshot_path, snapshot_every);
    if (verify->parsed()) return cmd_verify(verify_max_n, verify_grid, verify_trials, verify_seed);
    if (bench->parsed()) return cmd_bench(bench_n, bench_seed, bench_report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
