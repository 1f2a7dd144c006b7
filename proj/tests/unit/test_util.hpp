#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ms2gd/harness.hpp"

namespace testutil {

// Dense matrix -> dataset; zeros are simply not stored.
inline ms2gd::Dataset from_dense(const std::vector<std::vector<double>>& rows,
                                 std::vector<double> labels) {
  ms2gd::Dataset d;
  d.name = "dense";
  auto& m = d.features;
  m.n_rows = rows.size();
  m.n_cols = rows.empty() ? 0 : rows[0].size();
  m.row_offsets.push_back(0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j] != 0.0) {
        m.col_indices.push_back(static_cast<std::uint32_t>(j));
        m.values.push_back(r[j]);
      }
    }
    m.row_offsets.push_back(m.values.size());
  }
  d.labels = std::move(labels);
  return d;
}

inline std::vector<double> to_dense_row(const ms2gd::CsrMatrix& m,
                                        std::size_t i) {
  std::vector<double> r(m.n_cols, 0.0);
  auto cols = m.row_cols(i);
  auto vals = m.row_vals(i);
  for (std::size_t k = 0; k < cols.size(); ++k) r[cols[k]] = vals[k];
  return r;
}

// Random sparse classification problem with +-1 labels.
inline ms2gd::Dataset random_logistic(std::size_t n, std::size_t d,
                                      std::size_t nnz, std::uint64_t seed) {
  return ms2gd::make_sparse_logistic_dataset(n, d, nnz, seed);
}

inline double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline double nrm2(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace testutil
