#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ms2gd {

/// Row-compressed sparse matrix. Rows are the examples a_i.
/// Stored values are nonzero and column indices are strictly increasing
/// within a row (0-based in memory; the LIBSVM on-disk format is 1-based).
struct CsrMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_offsets;  // length n_rows+1, nondecreasing
  std::vector<std::uint32_t> col_indices;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
  std::size_t row_nnz(std::size_t i) const {
    return row_offsets[i + 1] - row_offsets[i];
  }
  std::span<const std::uint32_t> row_cols(std::size_t i) const {
    return {col_indices.data() + row_offsets[i], row_nnz(i)};
  }
  std::span<const double> row_vals(std::size_t i) const {
    return {values.data() + row_offsets[i], row_nnz(i)};
  }

  /// Throws std::invalid_argument if any structural invariant is broken.
  void validate() const;
};

struct Dataset {
  CsrMatrix features;
  std::vector<double> labels;  // length n_rows
  std::string name;

  std::size_t n_examples() const { return features.n_rows; }
  std::size_t dim() const { return features.n_cols; }
};

enum class LossId { logistic, squared };

/// Parses LIBSVM text: one `label idx:val ...` line per example, indices
/// 1-based and strictly increasing. Values equal to 0.0 are dropped.
/// n_cols is the max index seen, or expect_dim if larger.
Dataset load_libsvm(const std::string& path,
                    std::optional<std::size_t> expect_dim = std::nullopt);
Dataset load_libsvm(std::istream& in, const std::string& name,
                    std::optional<std::size_t> expect_dim = std::nullopt);

/// Writes the dataset back out in LIBSVM text form (1-based indices).
void save_libsvm(const Dataset& d, std::ostream& out);

/// a_i^T x, summed in stored index order.
double row_dot(const CsrMatrix& m, std::size_t i, std::span<const double> x);

/// Per-row smoothness constants and their max.
/// logistic: L_i = ||a_i||^2 / 4;  squared: L_i = ||a_i||^2.
std::pair<std::vector<double>, double> lipschitz_constants(const Dataset& d,
                                                           LossId loss);

/// Scales every nonempty row to unit Euclidean norm, in place.
void normalize_rows(Dataset& d);

}  // namespace ms2gd
