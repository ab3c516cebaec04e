#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spmm/algorithm.hpp"
#include "spmm/exec.hpp"
#include "spmm/generators.hpp"
#include "spmm/matrix.hpp"
#include "spmm/report.hpp"
#include "spmm/selector.hpp"

namespace spmm::bench {

/// Median of `reps` timed calls after `warmups` untimed ones (steady clock).
double median_seconds(const std::function<void()>& fn, std::size_t reps, std::size_t warmups = 1);

/// Largest relative error accepted by --verify for an element type.
template <typename T>
constexpr double verify_tolerance() {
  return sizeof(T) <= 4 ? 1e-5 : 1e-12;
}

enum class SweepKind { AspectRatio, Density, Corpus };

/// Settings shared by every harness command.
struct SweepSpec {
  SweepKind kind = SweepKind::AspectRatio;
  std::size_t repetitions = 5;
  RngSeed seed{42};
  ExecConfig exec;
  HeuristicConfig heuristic;
  /// Check every kernel result against spmm_reference.
  bool paranoid = false;
};

/// One line of sweep/run output. Optional fields are left empty in CSV.
struct SweepRow {
  std::string sweep;
  Algorithm algo = Algorithm::Reference;
  Index rows = 0;
  Index cols = 0;
  Index nnz = 0;
  Index n = 0;
  double d = 0.0;
  std::optional<double> fill;
  std::size_t reps = 0;
  double time_s = 0.0;
  double gflops = 0.0;
  std::optional<KernelMetrics> metrics;
  std::optional<double> max_rel_err;
};

/// Header and row writer for SweepRow. Numbers are written in shortest
/// round-trip form.
void write_sweep_header(std::ostream& out);
void write_sweep_row(std::ostream& out, const SweepRow& row);
std::string format_double(double v);

/// Times one algorithm on (a, b) and, for the two lane-group kernels,
/// collects metrics from one extra instrumented run. Throws
/// VerificationError if `verify` is set and the result misses the
/// reference by more than verify_tolerance<T>().
template <typename T>
SweepRow measure(const std::string& sweep, Algorithm algo, const CsrMatrix<T>& a,
                 const DenseMatrix<T>& b, const SweepSpec& spec, bool verify);

class VerificationError : public std::runtime_error {
 public:
  VerificationError(const std::string& what, double err) : std::runtime_error(what), err_(err) {}
  double error() const noexcept { return err_; }

 private:
  double err_;
};

struct AspectSweepParams {
  Index total_nnz = Index{1} << 20;
  /// Empty means 2^1 .. 2^19 (every power of two below total_nnz).
  std::vector<Index> row_counts;
  Index n = 64;
  std::vector<Algorithm> algos{Algorithm::RowSplit, Algorithm::MergeBased};
};

/// Default row counts: 2, 4, ..., total_nnz / 2.
std::vector<Index> default_row_counts(Index total_nnz);

template <typename T>
std::vector<SweepRow> sweep_aspect(const AspectSweepParams& params, const SweepSpec& spec);

struct DensitySweepParams {
  Index size = 1000;
  /// Empty means 0.01, 0.02, ..., 0.20, then 0.3, 0.4, ..., 1.0.
  std::vector<double> fractions;
  Index n = 64;
};

struct DensitySweepResult {
  std::vector<SweepRow> rows;
  /// First fill fraction at which the kernel ran slower than the dense
  /// product, if any.
  std::optional<double> crossover_rowsplit;
  std::optional<double> crossover_merge;
};

std::vector<double> default_fractions();

template <typename T>
DensitySweepResult sweep_density(const DensitySweepParams& params, const SweepSpec& spec);

struct ClassifyRow {
  std::string matrix;
  Index rows = 0;
  Index cols = 0;
  Index nnz = 0;
  double d = 0.0;
  double time_rowsplit = 0.0;
  double time_merge = 0.0;
  Algorithm oracle = Algorithm::RowSplit;
  Algorithm heuristic = Algorithm::RowSplit;
};

struct ClassifyResult {
  std::vector<ClassifyRow> rows;
  std::vector<std::string> skipped;
  double threshold = 0.0;
  double accuracy = 0.0;
  double fitted_threshold = 0.0;
  double fitted_accuracy = 0.0;
};

/// Threshold t from {observed d values} U {max d + 1} maximizing the number
/// of rows where (d < t ? MergeBased : RowSplit) equals the oracle; the
/// smallest such t wins ties. Returns (t, accuracy).
std::pair<double, double> fit_threshold(const std::vector<ClassifyRow>& rows);

struct ClassifyParams {
  std::filesystem::path corpus;
  Index n = 64;
};

/// Times both kernels on every *.mtx file in the corpus directory (sorted by
/// name). Unreadable files are listed in `skipped`; fewer than two readable
/// matrices is an error.
template <typename T>
ClassifyResult classify(const ClassifyParams& params, const SweepSpec& spec);

void write_classify_header(std::ostream& out);
void write_classify_row(std::ostream& out, const ClassifyRow& row);

}  // namespace spmm::bench
