#include "ms2gd/csr.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ms2gd {

void CsrMatrix::validate() const {
  if (row_offsets.size() != n_rows + 1)
    throw std::invalid_argument("csr: row_offsets length mismatch");
  if (row_offsets.front() != 0 || row_offsets.back() != values.size())
    throw std::invalid_argument("csr: row_offsets bounds mismatch");
  if (col_indices.size() != values.size())
    throw std::invalid_argument("csr: col/value length mismatch");
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (row_offsets[i + 1] < row_offsets[i])
      throw std::invalid_argument("csr: row_offsets not nondecreasing");
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (col_indices[k] >= n_cols)
        throw std::invalid_argument("csr: column index out of range");
      if (k > row_offsets[i] && col_indices[k] <= col_indices[k - 1])
        throw std::invalid_argument("csr: columns not strictly increasing");
      if (values[k] == 0.0)
        throw std::invalid_argument("csr: explicitly stored zero");
    }
  }
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("libsvm parse error at line " +
                           std::to_string(line_no) + ": " + what);
}

double parse_double(const char*& p, const char* end, std::size_t line_no,
                    const char* what) {
  char* after = nullptr;
  errno = 0;
  double v = std::strtod(p, &after);
  if (after == p || after > end || errno == ERANGE)
    parse_fail(line_no, std::string("bad ") + what);
  p = after;
  return v;
}

}  // namespace

Dataset load_libsvm(std::istream& in, const std::string& name,
                    std::optional<std::size_t> expect_dim) {
  Dataset d;
  d.name = name;
  d.features.row_offsets.push_back(0);
  std::size_t max_index = 0;  // 1-based
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const char* p = line.c_str();
    const char* end = p + line.size();
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p == end || *p == '#') continue;

    d.labels.push_back(parse_double(p, end, line_no, "label"));
    long long prev_index = 0;
    while (true) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p >= end) break;
      long long idx = 0;
      auto [next, ec] = std::from_chars(p, end, idx);
      if (ec != std::errc{} || next >= end || *next != ':')
        parse_fail(line_no, "bad feature token");
      if (idx < 1) parse_fail(line_no, "index must be >= 1");
      if (idx <= prev_index) parse_fail(line_no, "indices not increasing");
      prev_index = idx;
      p = next + 1;
      double val = parse_double(p, end, line_no, "feature value");
      if (static_cast<std::size_t>(idx) > max_index)
        max_index = static_cast<std::size_t>(idx);
      if (val != 0.0) {  // drop explicit zeros
        d.features.col_indices.push_back(static_cast<std::uint32_t>(idx - 1));
        d.features.values.push_back(val);
      }
    }
    d.features.row_offsets.push_back(d.features.values.size());
  }
  if (d.labels.empty()) throw std::runtime_error("libsvm: no rows in " + name);
  if (expect_dim && *expect_dim < max_index)
    throw std::runtime_error("libsvm: expect_dim " +
                             std::to_string(*expect_dim) +
                             " smaller than max index " +
                             std::to_string(max_index));
  d.features.n_rows = d.labels.size();
  d.features.n_cols = expect_dim ? std::max(*expect_dim, max_index) : max_index;
  return d;
}

Dataset load_libsvm(const std::string& path,
                    std::optional<std::size_t> expect_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_libsvm(in, path, expect_dim);
}

void save_libsvm(const Dataset& d, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < d.n_examples(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", d.labels[i]);
    out << buf;
    auto cols = d.features.row_cols(i);
    auto vals = d.features.row_vals(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      std::snprintf(buf, sizeof buf, " %u:%.17g", cols[k] + 1, vals[k]);
      out << buf;
    }
    out << '\n';
  }
}

double row_dot(const CsrMatrix& m, std::size_t i, std::span<const double> x) {
  if (i >= m.n_rows) throw std::invalid_argument("row_dot: row out of range");
  if (x.size() != m.n_cols)
    throw std::invalid_argument("row_dot: dimension mismatch");
  auto cols = m.row_cols(i);
  auto vals = m.row_vals(i);
  double s = 0.0;
  for (std::size_t k = 0; k < cols.size(); ++k) s += vals[k] * x[cols[k]];
  return s;
}

std::pair<std::vector<double>, double> lipschitz_constants(const Dataset& d,
                                                           LossId loss) {
  std::vector<double> per_row(d.n_examples());
  double max_l = 0.0;
  for (std::size_t i = 0; i < d.n_examples(); ++i) {
    double sq = 0.0;
    for (double v : d.features.row_vals(i)) sq += v * v;
    double li = 0.0;
    switch (loss) {
      case LossId::logistic: li = sq / 4.0; break;
      case LossId::squared: li = sq; break;
      default: throw std::invalid_argument("unknown loss id");
    }
    per_row[i] = li;
    if (li > max_l) max_l = li;
  }
  return {std::move(per_row), max_l};
}

void normalize_rows(Dataset& d) {
  for (std::size_t i = 0; i < d.n_examples(); ++i) {
    double sq = 0.0;
    for (double v : d.features.row_vals(i)) sq += v * v;
    if (sq == 0.0) continue;
    double inv = 1.0 / std::sqrt(sq);
    for (std::size_t k = d.features.row_offsets[i];
         k < d.features.row_offsets[i + 1]; ++k)
      d.features.values[k] *= inv;
  }
}

}  // namespace ms2gd
