#include "spmm/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "spmm/error.hpp"

namespace spmm {
namespace {

enum class Field { Real, Integer, Pattern };
enum class Symmetry { General, Symmetric, SkewSymmetric };

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Index parse_index(const std::string& tok, std::size_t line_no, const char* what) {
  Index v = 0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc::result_out_of_range)
    throw ParseError(line_no, std::string(what) + " overflows: " + tok);
  if (ec != std::errc() || ptr != last)
    throw ParseError(line_no, std::string("malformed ") + what + ": '" + tok + "'");
  return v;
}

double parse_real(const std::string& tok, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError(line_no, "malformed value: '" + tok + "'");
  return v;
}

}  // namespace

template <typename T>
MatrixMarketData<T> read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(0, "empty input");
  ++line_no;
  std::istringstream header(line);
  std::string banner, object, format, field_s, symmetry_s;
  header >> banner >> object >> format >> field_s >> symmetry_s;
  if (banner != "%%MatrixMarket") throw ParseError(line_no, "missing %%MatrixMarket banner");
  if (lower(object) != "matrix") throw ParseError(line_no, "unsupported object '" + object + "'");
  if (lower(format) != "coordinate")
    throw ParseError(line_no, "unsupported format '" + format + "' (only coordinate)");

  Field field{};
  field_s = lower(field_s);
  if (field_s == "real" || field_s == "double") field = Field::Real;
  else if (field_s == "integer") field = Field::Integer;
  else if (field_s == "pattern") field = Field::Pattern;
  else throw ParseError(line_no, "unsupported field '" + field_s + "'");

  Symmetry symmetry{};
  symmetry_s = lower(symmetry_s);
  if (symmetry_s == "general") symmetry = Symmetry::General;
  else if (symmetry_s == "symmetric") symmetry = Symmetry::Symmetric;
  else if (symmetry_s == "skew-symmetric") symmetry = Symmetry::SkewSymmetric;
  else throw ParseError(line_no, "unsupported symmetry '" + symmetry_s + "'");

  MatrixMarketData<T> out;
  Index declared = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    std::istringstream size_line(line);
    std::string rows_tok, cols_tok, nnz_tok, extra;
    if (!(size_line >> rows_tok >> cols_tok >> nnz_tok) || (size_line >> extra))
      throw ParseError(line_no, "size line must be 'rows cols entries'");
    out.num_rows = parse_index(rows_tok, line_no, "row count");
    out.num_cols = parse_index(cols_tok, line_no, "column count");
    declared = parse_index(nnz_tok, line_no, "entry count");
    if (out.num_rows < 0 || out.num_cols < 0 || declared < 0)
      throw ParseError(line_no, "negative size");
    break;
  }
  if (declared < 0) throw ParseError(line_no, "missing size line");
  if ((symmetry != Symmetry::General) && out.num_rows != out.num_cols)
    throw ParseError(line_no, "symmetric storage requires a square matrix");

  out.triples.reserve(static_cast<std::size_t>(declared) *
                      (symmetry == Symmetry::General ? 1 : 2));
  Index seen = 0;
  const std::size_t expected_tokens = field == Field::Pattern ? 2 : 3;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    if (seen == declared) throw ParseError(line_no, "more entries than declared");
    std::istringstream entry(line);
    std::string tok[4];
    std::size_t count = 0;
    while (count < 4 && entry >> tok[count]) ++count;
    if (count != expected_tokens)
      throw ParseError(line_no, "expected " + std::to_string(expected_tokens) + " fields, got " +
                                    std::to_string(count));
    const Index i = parse_index(tok[0], line_no, "row index");
    const Index j = parse_index(tok[1], line_no, "column index");
    if (i < 1 || i > out.num_rows || j < 1 || j > out.num_cols)
      throw ParseError(line_no, "index (" + tok[0] + ", " + tok[1] + ") outside " +
                                    std::to_string(out.num_rows) + " x " +
                                    std::to_string(out.num_cols));
    T value{1};
    if (field == Field::Integer) value = static_cast<T>(parse_index(tok[2], line_no, "value"));
    else if (field == Field::Real) value = static_cast<T>(parse_real(tok[2], line_no));

    out.triples.push_back({i - 1, j - 1, value});
    if (i != j) {
      if (symmetry == Symmetry::Symmetric) out.triples.push_back({j - 1, i - 1, value});
      else if (symmetry == Symmetry::SkewSymmetric) out.triples.push_back({j - 1, i - 1, -value});
    } else if (symmetry == Symmetry::SkewSymmetric && value != T{0}) {
      throw ParseError(line_no, "skew-symmetric matrix with nonzero diagonal");
    }
    ++seen;
  }
  if (seen != declared)
    throw ParseError(line_no, "expected " + std::to_string(declared) + " entries, found " +
                                  std::to_string(seen));
  return out;
}

template <typename T>
CsrMatrix<T> load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  auto data = read_matrix_market<T>(in);
  return build_csr<T>(data.num_rows, data.num_cols, data.triples);
}

template <typename T>
void write_matrix_market(std::ostream& out, const CsrMatrix<T>& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.num_rows() << ' ' << a.num_cols() << ' ' << a.nnz() << '\n';
  const auto old_precision = out.precision(std::numeric_limits<T>::max_digits10);
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (Index r = 0; r < a.num_rows(); ++r)
    for (Index p = a.row_begin(r); p < a.row_end(r); ++p)
      out << r + 1 << ' ' << cols[static_cast<std::size_t>(p)] + 1 << ' '
          << vals[static_cast<std::size_t>(p)] << '\n';
  out.precision(old_precision);
}

template <typename T>
void save_matrix_market(const std::filesystem::path& path, const CsrMatrix<T>& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_matrix_market(out, a);
}

template MatrixMarketData<float> read_matrix_market<float>(std::istream&);
template MatrixMarketData<double> read_matrix_market<double>(std::istream&);
template CsrMatrix<float> load_matrix_market<float>(const std::filesystem::path&);
template CsrMatrix<double> load_matrix_market<double>(const std::filesystem::path&);
template void write_matrix_market<float>(std::ostream&, const CsrMatrix<float>&);
template void write_matrix_market<double>(std::ostream&, const CsrMatrix<double>&);
template void save_matrix_market<float>(const std::filesystem::path&, const CsrMatrix<float>&);
template void save_matrix_market<double>(const std::filesystem::path&, const CsrMatrix<double>&);

}  // namespace spmm
