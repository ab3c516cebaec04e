// spmm: command-line harness for the SpMM kernels.
//
//   spmm run MATRIX.mtx --algo merge --n 64 --verify
//   spmm sweep-aspect --total-nnz 1048576 --csv aspect.csv
//   spmm sweep-density --size 1000 --csv density.csv
//   spmm classify CORPUS_DIR --threshold 9.35
//   spmm gen aspect --total-nnz 65536 --rows 64 --out m.mtx

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spmm/bench.hpp"
#include "spmm/matrix_market.hpp"
#include "spmm/merge.hpp"
#include "spmm/reference.hpp"
#include "spmm/rowsplit.hpp"
#include "spmm/selector.hpp"

namespace {

using namespace spmm;

struct CommonOptions {
  std::size_t reps = 5;
  std::uint64_t seed = 42;
  std::size_t workers = 0;
  std::string csv;
  std::string precision = "f32";
  double threshold = 9.35;
  bool paranoid = false;
};

struct RunOptions {
  std::string matrix;
  std::string algo = "auto";
  Index n = 64;
  bool verify = false;
  bool instrument = false;
  std::string trace_csv;
  std::string dump_c;
};

struct AspectOptions {
  Index total_nnz = Index{1} << 20;
  std::vector<Index> rows;
  Index n = 64;
  std::vector<std::string> algos{"rowsplit", "merge"};
};

struct DensityOptions {
  Index size = 1000;
  std::vector<double> fractions;
  Index n = 64;
};

struct ClassifyOptions {
  std::string corpus;
  Index n = 64;
};

struct GenOptions {
  std::string family;
  std::string out;
  Index total_nnz = Index{1} << 16;
  Index rows = 64;
  Index size = 1000;
  double fill = 0.01;
};

bench::SweepSpec make_spec(const CommonOptions& common, bench::SweepKind kind) {
  bench::SweepSpec spec;
  spec.kind = kind;
  spec.repetitions = common.reps;
  spec.seed = RngSeed{common.seed};
  spec.exec = ExecConfig::from_env();
  spec.exec.workers = common.workers;
  spec.heuristic.threshold = common.threshold;
  spec.paranoid = common.paranoid;
  return spec;
}

// Writes to the --csv file when given, else stdout. Summary lines go to
// stdout only when they cannot end up inside the CSV stream.
class CsvSink {
 public:
  explicit CsvSink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& csv() { return file_ ? *file_ : std::cout; }
  std::ostream& summary() { return file_ ? std::cout : std::cerr; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void print_report(std::ostream& out, const KernelReport& r, std::size_t reps, double median) {
  out << "algorithm=" << to_string(r.algorithm) << '\n'
      << "nnz=" << r.nnz << '\n'
      << "n=" << r.n << '\n'
      << "reps=" << reps << '\n'
      << "time_s=" << bench::format_double(median) << '\n'
      << "gflops="
      << bench::format_double(median > 0 ? 2.0 * static_cast<double>(r.nnz) *
                                               static_cast<double>(r.n) / median / 1e9
                                         : 0.0)
      << '\n';
  if (r.algorithm == Algorithm::Reference) return;
  out << "registers_per_lane=" << r.registers_per_lane << '\n'
      << "reads_a=" << r.counters.reads_a << '\n'
      << "reads_b=" << r.counters.reads_b << '\n'
      << "writes_c=" << r.counters.writes_c << '\n'
      << "broadcast_rounds=" << r.counters.broadcast_rounds << '\n'
      << "partition_overhead_accesses=" << r.counters.partition_overhead_accesses << '\n'
      << "carryout_accesses=" << r.counters.carryout_accesses << '\n';
  if (r.metrics) {
    out << "type1=" << bench::format_double(r.metrics->type1) << '\n'
        << "type2=" << bench::format_double(r.metrics->type2) << '\n';
    for (std::size_t k = 0; k < kNumAccessKinds; ++k) {
      const auto kind = static_cast<AccessKind>(k);
      if (auto c = r.metrics->coalescing_for(kind))
        out << "coalescing_" << to_string(kind) << '=' << bench::format_double(*c) << '\n';
      if (auto u = r.metrics->utilization_for(kind))
        out << "utilization_" << to_string(kind) << '=' << bench::format_double(*u) << '\n';
    }
  }
}

template <typename T>
int cmd_run(const RunOptions& opt, const CommonOptions& common) {
  if (opt.n < 1) throw ArgumentError("--n must be >= 1");
  const auto spec = make_spec(common, bench::SweepKind::Corpus);
  const auto a = load_matrix_market<T>(opt.matrix);
  const auto b = random_dense<T>(a.num_cols(), opt.n, Layout::RowMajor, spec.seed);
  const AutoConfig auto_cfg{spec.exec, spec.heuristic};
  const TraceMode mode = !opt.trace_csv.empty() ? TraceMode::Full
                         : opt.instrument       ? TraceMode::Aggregate
                                                : TraceMode::Off;

  auto invoke = [&](TraceMode m) -> KernelResult<T> {
    if (opt.algo == "rowsplit") return spmm_rowsplit(a, b, RowSplitParams{spec.exec, 0}, m);
    if (opt.algo == "merge") return spmm_merge(a, b, spec.exec, m);
    if (opt.algo == "auto") return spmm_auto(a, b, auto_cfg, m);
    KernelResult<T> r{spmm_reference(a, b), std::nullopt, {}};
    r.report.algorithm = Algorithm::Reference;
    r.report.nnz = a.nnz();
    r.report.n = opt.n;
    return r;
  };

  const double median = bench::median_seconds([&] { (void)invoke(TraceMode::Off); }, spec.repetitions);
  KernelResult<T> result = invoke(opt.algo == "reference" ? TraceMode::Off : mode);

  CsvSink sink(common.csv);
  std::ostream& out = common.csv.empty() ? std::cout : sink.summary();
  print_report(out, result.report, spec.repetitions, median);

  std::optional<double> err;
  if (opt.verify) {
    err = max_relative_error(result.c, spmm_reference(a, b));
    out << "max_rel_err=" << bench::format_double(*err) << '\n';
  }
  if (!common.csv.empty()) {
    bench::SweepRow row;
    row.sweep = "run";
    row.algo = result.report.algorithm;
    row.rows = a.num_rows();
    row.cols = a.num_cols();
    row.nnz = a.nnz();
    row.n = opt.n;
    row.d = a.num_rows() > 0 ? mean_row_length(a) : 0.0;
    row.reps = spec.repetitions;
    row.time_s = median;
    row.gflops = median > 0 ? 2.0 * static_cast<double>(row.nnz) * static_cast<double>(row.n) / median / 1e9 : 0.0;
    row.metrics = result.report.metrics;
    row.max_rel_err = err;
    bench::write_sweep_header(sink.csv());
    bench::write_sweep_row(sink.csv(), row);
  }
  if (!opt.trace_csv.empty() && result.trace) {
    std::ofstream trace_out(opt.trace_csv);
    if (!trace_out) throw std::runtime_error("cannot write " + opt.trace_csv);
    write_trace_csv(trace_out, *result.trace);
  }
  if (!opt.dump_c.empty()) {
    std::ofstream dump(opt.dump_c);
    if (!dump) throw std::runtime_error("cannot write " + opt.dump_c);
    for (Index i = 0; i < result.c.num_rows(); ++i) {
      for (Index j = 0; j < result.c.num_cols(); ++j)
        dump << (j ? "," : "") << bench::format_double(static_cast<double>(result.c(i, j)));
      dump << '\n';
    }
  }
  if (err && !(*err <= bench::verify_tolerance<T>())) {
    std::cerr << "verification failed: max_rel_err=" << bench::format_double(*err) << " > "
              << bench::format_double(bench::verify_tolerance<T>()) << '\n';
    return 2;
  }
  return 0;
}

std::vector<Algorithm> parse_algos(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const auto& name : names) {
    const auto algo = parse_algorithm(name);
    if (!algo) throw ArgumentError("unknown algorithm '" + name + "'");
    out.push_back(*algo);
  }
  return out;
}

template <typename T>
int cmd_sweep_aspect(const AspectOptions& opt, const CommonOptions& common) {
  const auto spec = make_spec(common, bench::SweepKind::AspectRatio);
  bench::AspectSweepParams params;
  params.total_nnz = opt.total_nnz;
  params.row_counts = opt.rows;
  params.n = opt.n;
  params.algos = parse_algos(opt.algos);
  CsvSink sink(common.csv);
  const auto rows = bench::sweep_aspect<T>(params, spec);
  bench::write_sweep_header(sink.csv());
  for (const auto& r : rows) bench::write_sweep_row(sink.csv(), r);
  return 0;
}

template <typename T>
int cmd_sweep_density(const DensityOptions& opt, const CommonOptions& common) {
  const auto spec = make_spec(common, bench::SweepKind::Density);
  bench::DensitySweepParams params;
  params.size = opt.size;
  params.fractions = opt.fractions;
  params.n = opt.n;
  CsvSink sink(common.csv);
  const auto result = bench::sweep_density<T>(params, spec);
  bench::write_sweep_header(sink.csv());
  for (const auto& r : result.rows) bench::write_sweep_row(sink.csv(), r);
  auto show = [](const std::optional<double>& f) {
    return f ? bench::format_double(*f) : std::string("none");
  };
  sink.summary() << "crossover_rowsplit=" << show(result.crossover_rowsplit) << '\n'
                 << "crossover_merge=" << show(result.crossover_merge) << '\n';
  return 0;
}

template <typename T>
int cmd_classify(const ClassifyOptions& opt, const CommonOptions& common) {
  const auto spec = make_spec(common, bench::SweepKind::Corpus);
  CsvSink sink(common.csv);
  const auto result = bench::classify<T>(bench::ClassifyParams{opt.corpus, opt.n}, spec);
  bench::write_classify_header(sink.csv());
  for (const auto& r : result.rows) bench::write_classify_row(sink.csv(), r);
  sink.summary() << "matrices=" << result.rows.size() << '\n'
                 << "skipped=" << result.skipped.size() << '\n'
                 << "threshold=" << bench::format_double(result.threshold) << '\n'
                 << "accuracy=" << bench::format_double(result.accuracy) << '\n'
                 << "fitted_threshold=" << bench::format_double(result.fitted_threshold) << '\n'
                 << "fitted_accuracy=" << bench::format_double(result.fitted_accuracy) << '\n';
  return 0;
}

int cmd_gen(const GenOptions& opt, const CommonOptions& common) {
  CsrMatrix<double> a;
  if (opt.family == "aspect") a = gen_aspect_matrix<double>(opt.total_nnz, opt.rows);
  else a = gen_uniform_random<double>(opt.size, opt.size, opt.fill, RngSeed{common.seed});
  save_matrix_market(opt.out, a);
  return 0;
}

template <typename Fn>
int dispatch_precision(const std::string& precision, Fn&& fn) {
  if (precision == "f64") return fn(double{});
  return fn(float{});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CSR sparse x dense matrix multiplication kernels and benchmarks"};
  app.require_subcommand(1);
  CommonOptions common;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--reps", common.reps, "Timed repetitions (median reported)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", common.seed, "Seed for random operands");
    sub->add_option("--workers", common.workers, "Host threads (0 = all cores)");
    sub->add_option("--csv", common.csv, "Write CSV here instead of stdout");
    sub->add_option("--precision", common.precision, "Element type")
        ->check(CLI::IsMember({"f32", "f64"}));
    sub->add_option("--threshold", common.threshold, "Mean-row-length dispatch threshold")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--paranoid", common.paranoid, "Verify every kernel run against the reference");
  };

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run one kernel on a Matrix Market file");
  run_cmd->add_option("matrix", run.matrix, "Matrix Market file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--algo", run.algo, "Kernel")
      ->check(CLI::IsMember({"rowsplit", "merge", "auto", "reference"}));
  run_cmd->add_option("--n", run.n, "Columns of the dense operand")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--verify", run.verify, "Compare against the sequential reference");
  run_cmd->add_flag("--instrument", run.instrument, "Collect coalescing and load-balance metrics");
  run_cmd->add_option("--trace-csv", run.trace_csv, "Write the per-access trace as CSV");
  run_cmd->add_option("--dump-c", run.dump_c, "Write C as CSV");
  add_common(run_cmd);

  AspectOptions aspect;
  auto* aspect_cmd = app.add_subcommand("sweep-aspect", "Fixed nonzero count, varying aspect ratio");
  aspect_cmd->add_option("--total-nnz", aspect.total_nnz, "Nonzeros per matrix")
      ->check(CLI::PositiveNumber);
  aspect_cmd->add_option("--rows", aspect.rows, "Row counts (default 2,4,...,total/2)")->delimiter(',');
  aspect_cmd->add_option("--n", aspect.n, "Columns of the dense operand")->check(CLI::PositiveNumber);
  aspect_cmd->add_option("--algos", aspect.algos, "Kernels")->delimiter(',');
  add_common(aspect_cmd);

  DensityOptions density;
  auto* density_cmd = app.add_subcommand("sweep-density", "Random matrices of rising fill vs dense GEMM");
  density_cmd->add_option("--size", density.size, "Matrix dimension")->check(CLI::PositiveNumber);
  density_cmd->add_option("--fractions", density.fractions, "Fill fractions (default 0.01..0.20 by 0.01, then 0.3..1.0 by 0.1)")
      ->delimiter(',');
  density_cmd->add_option("--n", density.n, "Columns of the dense operand")->check(CLI::PositiveNumber);
  add_common(density_cmd);

  ClassifyOptions classify;
  auto* classify_cmd = app.add_subcommand("classify", "Score the dispatch heuristic on a corpus");
  classify_cmd->add_option("corpus", classify.corpus, "Directory of .mtx files")
      ->required()
      ->check(CLI::ExistingDirectory);
  classify_cmd->add_option("--n", classify.n, "Columns of the dense operand")->check(CLI::PositiveNumber);
  add_common(classify_cmd);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic matrix as Matrix Market");
  gen_cmd->add_option("family", gen.family, "aspect | uniform")
      ->required()
      ->check(CLI::IsMember({"aspect", "uniform"}));
  gen_cmd->add_option("--out", gen.out, "Output file")->required();
  gen_cmd->add_option("--total-nnz", gen.total_nnz, "aspect: nonzeros");
  gen_cmd->add_option("--rows", gen.rows, "aspect: rows");
  gen_cmd->add_option("--size", gen.size, "uniform: dimension");
  gen_cmd->add_option("--fill", gen.fill, "uniform: fill fraction");
  gen_cmd->add_option("--seed", common.seed, "uniform: seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd)
      return dispatch_precision(common.precision,
                                [&](auto t) { return cmd_run<decltype(t)>(run, common); });
    if (*aspect_cmd)
      return dispatch_precision(common.precision,
                                [&](auto t) { return cmd_sweep_aspect<decltype(t)>(aspect, common); });
    if (*density_cmd)
      return dispatch_precision(common.precision, [&](auto t) {
        return cmd_sweep_density<decltype(t)>(density, common);
      });
    if (*classify_cmd)
      return dispatch_precision(common.precision,
                                [&](auto t) { return cmd_classify<decltype(t)>(classify, common); });
    if (*gen_cmd) return cmd_gen(gen, common);
  } catch (const bench::VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
