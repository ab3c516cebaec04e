#include "spmm/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <iostream>
#include <ostream>

#include "spmm/matrix_market.hpp"
#include "spmm/merge.hpp"
#include "spmm/reference.hpp"
#include "spmm/rowsplit.hpp"

namespace spmm::bench {

double median_seconds(const std::function<void()>& fn, std::size_t reps, std::size_t warmups) {
  if (reps == 0) throw ArgumentError("median_seconds: repetitions must be >= 1");
  for (std::size_t i = 0; i < warmups; ++i) fn();
  std::vector<double> times(reps);
  for (auto& t : times) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  std::sort(times.begin(), times.end());
  return reps % 2 == 1 ? times[reps / 2] : 0.5 * (times[reps / 2 - 1] + times[reps / 2]);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

namespace {

void write_opt(std::ostream& out, const std::optional<double>& v) {
  out << ',';
  if (v) out << format_double(*v);
}

}  // namespace

void write_sweep_header(std::ostream& out) {
  out << "sweep,algo,rows,cols,nnz,n,d,fill,reps,time_s,gflops,type1,type2,"
         "util_a,util_b,coal_a,coal_b,coal_c,max_rel_err\n";
}

void write_sweep_row(std::ostream& out, const SweepRow& r) {
  out << r.sweep << ',' << to_string(r.algo) << ',' << r.rows << ',' << r.cols << ',' << r.nnz
      << ',' << r.n << ',' << format_double(r.d);
  write_opt(out, r.fill);
  out << ',' << r.reps << ',' << format_double(r.time_s) << ',' << format_double(r.gflops);
  std::optional<double> type1, type2, ua, ub, ca, cb, cc;
  if (r.metrics) {
    type1 = r.metrics->type1;
    type2 = r.metrics->type2;
    ua = r.metrics->utilization_for(AccessKind::ReadA);
    ub = r.metrics->utilization_for(AccessKind::ReadB);
    ca = r.metrics->coalescing_for(AccessKind::ReadA);
    cb = r.metrics->coalescing_for(AccessKind::ReadB);
    cc = r.metrics->coalescing_for(AccessKind::WriteC);
  }
  for (const auto& v : {type1, type2, ua, ub, ca, cb, cc}) write_opt(out, v);
  write_opt(out, r.max_rel_err);
  out << '\n';
}

template <typename T>
SweepRow measure(const std::string& sweep, Algorithm algo, const CsrMatrix<T>& a,
                 const DenseMatrix<T>& b, const SweepSpec& spec, bool verify) {
  SweepRow row;
  row.sweep = sweep;
  row.algo = algo;
  row.rows = a.num_rows();
  row.cols = a.num_cols();
  row.nnz = a.nnz();
  row.n = b.num_cols();
  row.d = a.num_rows() > 0 ? mean_row_length(a) : 0.0;
  row.reps = spec.repetitions;

  const RowSplitParams rs{spec.exec, 0};
  DenseMatrix<T> c;
  std::function<void()> run;
  DenseMatrix<T> dense_a;
  switch (algo) {
    case Algorithm::RowSplit:
      run = [&] { c = spmm_rowsplit(a, b, rs).c; };
      break;
    case Algorithm::MergeBased:
      run = [&] { c = spmm_merge(a, b, spec.exec).c; };
      break;
    case Algorithm::Reference:
      run = [&] { c = spmm_reference(a, b); };
      break;
    case Algorithm::DenseGemm:
      dense_a = densify(a);
      run = [&] { c = gemm_reference(dense_a, b, spec.exec.workers); };
      break;
  }
  row.time_s = median_seconds(run, spec.repetitions);
  row.gflops = row.time_s > 0.0
                   ? 2.0 * static_cast<double>(row.nnz) * static_cast<double>(row.n) / row.time_s / 1e9
                   : 0.0;

  if (algo == Algorithm::RowSplit)
    row.metrics = spmm_rowsplit(a, b, rs, TraceMode::Aggregate).report.metrics;
  else if (algo == Algorithm::MergeBased)
    row.metrics = spmm_merge(a, b, spec.exec, TraceMode::Aggregate).report.metrics;

  if (verify) {
    const double err = max_relative_error(c, spmm_reference(a, b));
    row.max_rel_err = err;
    if (!(err <= verify_tolerance<T>()))
      throw VerificationError(std::string(to_string(algo)) + " on " + std::to_string(a.num_rows()) +
                                  " x " + std::to_string(a.num_cols()) +
                                  ": max relative error " + format_double(err),
                              err);
  }
  return row;
}

std::vector<Index> default_row_counts(Index total_nnz) {
  std::vector<Index> out;
  for (Index r = 2; r < total_nnz; r *= 2)
    if (total_nnz % r == 0) out.push_back(r);
  return out;
}

template <typename T>
std::vector<SweepRow> sweep_aspect(const AspectSweepParams& params, const SweepSpec& spec) {
  const auto counts =
      params.row_counts.empty() ? default_row_counts(params.total_nnz) : params.row_counts;
  for (Index r : counts) {
    if (r <= 0 || params.total_nnz % r != 0)
      throw ArgumentError("sweep-aspect: " + std::to_string(r) + " rows do not divide " +
                          std::to_string(params.total_nnz) + " nonzeros");
  }
  std::vector<SweepRow> rows;
  for (Index r : counts) {
    const auto a = gen_aspect_matrix<T>(params.total_nnz, r);
    const auto b = random_dense<T>(a.num_cols(), params.n, Layout::RowMajor, spec.seed);
    for (Algorithm algo : params.algos) rows.push_back(measure(std::string("aspect"), algo, a, b, spec, spec.paranoid));
  }
  return rows;
}

std::vector<double> default_fractions() {
  std::vector<double> out;
  for (int i = 1; i <= 20; ++i) out.push_back(i / 100.0);
  for (int i = 3; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

template <typename T>
DensitySweepResult sweep_density(const DensitySweepParams& params, const SweepSpec& spec) {
  const auto fractions = params.fractions.empty() ? default_fractions() : params.fractions;
  for (double f : fractions)
    if (!(f >= 0.0 && f <= 1.0)) throw ArgumentError("sweep-density: fraction outside [0, 1]");

  DensitySweepResult out;
  const auto b = random_dense<T>(params.size, params.n, Layout::RowMajor, spec.seed);
  for (double f : fractions) {
    const auto a = gen_uniform_random<T>(params.size, params.size, f, RngSeed{spec.seed.seed + 1});
    SweepRow rs = measure(std::string("density"), Algorithm::RowSplit, a, b, spec, spec.paranoid);
    SweepRow mg = measure(std::string("density"), Algorithm::MergeBased, a, b, spec, spec.paranoid);
    SweepRow dn = measure(std::string("density"), Algorithm::DenseGemm, a, b, spec, spec.paranoid);
    for (SweepRow* r : {&rs, &mg, &dn}) {
      r->fill = f;
      out.rows.push_back(*r);
    }
    if (!out.crossover_rowsplit && rs.time_s > dn.time_s) out.crossover_rowsplit = f;
    if (!out.crossover_merge && mg.time_s > dn.time_s) out.crossover_merge = f;
  }
  return out;
}

std::pair<double, double> fit_threshold(const std::vector<ClassifyRow>& rows) {
  if (rows.empty()) throw ArgumentError("fit_threshold: no observations");
  std::vector<double> candidates;
  for (const auto& r : rows) candidates.push_back(r.d);
  candidates.push_back(*std::max_element(candidates.begin(), candidates.end()) + 1.0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  double best_t = candidates.front();
  std::size_t best_hits = 0;
  for (double t : candidates) {
    std::size_t hits = 0;
    for (const auto& r : rows)
      hits += (r.d < t ? Algorithm::MergeBased : Algorithm::RowSplit) == r.oracle;
    if (hits > best_hits) {
      best_hits = hits;
      best_t = t;
    }
  }
  return {best_t, static_cast<double>(best_hits) / static_cast<double>(rows.size())};
}

template <typename T>
ClassifyResult classify(const ClassifyParams& params, const SweepSpec& spec) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(params.corpus))
    throw ArgumentError("classify: " + params.corpus.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(params.corpus))
    if (entry.is_regular_file() && entry.path().extension() == ".mtx") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  ClassifyResult out;
  out.threshold = spec.heuristic.threshold;
  const RowSplitParams rs{spec.exec, 0};
  for (const auto& path : files) {
    CsrMatrix<T> a;
    try {
      a = load_matrix_market<T>(path);
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << path.string() << ": " << e.what() << '\n';
      out.skipped.push_back(path.string());
      continue;
    }
    if (a.num_rows() == 0) {
      std::cerr << "warning: skipping " << path.string() << ": no rows\n";
      out.skipped.push_back(path.string());
      continue;
    }
    const auto b = random_dense<T>(a.num_cols(), params.n, Layout::RowMajor, spec.seed);
    ClassifyRow row;
    row.matrix = path.filename().string();
    row.rows = a.num_rows();
    row.cols = a.num_cols();
    row.nnz = a.nnz();
    row.d = mean_row_length(a);
    row.time_rowsplit = median_seconds([&] { (void)spmm_rowsplit(a, b, rs); }, spec.repetitions);
    row.time_merge = median_seconds([&] { (void)spmm_merge(a, b, spec.exec); }, spec.repetitions);
    row.oracle = row.time_merge < row.time_rowsplit ? Algorithm::MergeBased : Algorithm::RowSplit;
    row.heuristic = choose_algorithm(row.d, spec.heuristic);
    out.rows.push_back(std::move(row));
  }
  if (out.rows.size() < 2)
    throw ArgumentError("classify: need at least two readable matrices, found " +
                        std::to_string(out.rows.size()));
  std::size_t hits = 0;
  for (const auto& r : out.rows) hits += r.oracle == r.heuristic;
  out.accuracy = static_cast<double>(hits) / static_cast<double>(out.rows.size());
  std::tie(out.fitted_threshold, out.fitted_accuracy) = fit_threshold(out.rows);
  return out;
}

void write_classify_header(std::ostream& out) {
  out << "matrix,rows,cols,nnz,d,time_rowsplit_s,time_merge_s,oracle,heuristic,correct\n";
}

void write_classify_row(std::ostream& out, const ClassifyRow& r) {
  out << r.matrix << ',' << r.rows << ',' << r.cols << ',' << r.nnz << ',' << format_double(r.d)
      << ',' << format_double(r.time_rowsplit) << ',' << format_double(r.time_merge) << ','
      << to_string(r.oracle) << ',' << to_string(r.heuristic) << ','
      << (r.oracle == r.heuristic ? 1 : 0) << '\n';
}

#define SPMM_INSTANTIATE(T)                                                                   \
  template SweepRow measure<T>(const std::string&, Algorithm, const CsrMatrix<T>&,            \
                               const DenseMatrix<T>&, const SweepSpec&, bool);               \
  template std::vector<SweepRow> sweep_aspect<T>(const AspectSweepParams&, const SweepSpec&); \
  template DensitySweepResult sweep_density<T>(const DensitySweepParams&, const SweepSpec&);  \
  template ClassifyResult classify<T>(const ClassifyParams&, const SweepSpec&);

SPMM_INSTANTIATE(float)
SPMM_INSTANTIATE(double)

#undef SPMM_INSTANTIATE

}  // namespace spmm::bench
