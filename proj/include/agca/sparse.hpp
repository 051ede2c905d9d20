// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "agca/common.hpp"

namespace agca
{

struct Triplet
{
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row matrix with sorted column indices per row.
class CsrMatrix
{
public:
  CsrMatrix() = default;

  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets)
    : rows_(rows), cols_(cols), ptr_(rows + 1, 0)
  {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet &a, const Triplet &b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    for (std::size_t k = 0; k < triplets.size();)
    {
      const auto &t = triplets[k];
      if (t.row >= rows || t.col >= cols)
      {
        throw ArgumentError("triplet outside matrix bounds");
      }
      double v = 0.0;
      std::size_t e = k;
      while (e < triplets.size() && triplets[e].row == t.row && triplets[e].col == t.col)
      {
        v += triplets[e].value;
        ++e;
      }
      idx_.push_back(t.col);
      val_.push_back(v);
      ++ptr_[t.row + 1];
      k = e;
    }
    for (std::size_t r = 0; r < rows; ++r)
    {
      ptr_[r + 1] += ptr_[r];
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return val_.size(); }
  std::size_t size() const { return rows_; }

  std::span<const std::size_t> row_ptr() const { return ptr_; }
  std::span<const std::size_t> col_idx() const { return idx_; }
  std::span<const double> values() const { return val_; }

  std::size_t row_nnz(std::size_t r) const { return ptr_[r + 1] - ptr_[r]; }

  double at(std::size_t r, std::size_t c) const
  {
    const auto b = idx_.begin() + static_cast<std::ptrdiff_t>(ptr_[r]);
    const auto e = idx_.begin() + static_cast<std::ptrdiff_t>(ptr_[r + 1]);
    const auto it = std::lower_bound(b, e, c);
    return (it != e && *it == c) ? val_[static_cast<std::size_t>(it - idx_.begin())] : 0.0;
  }

  void apply(std::span<const double> x, std::span<double> y) const
  {
    if (x.size() != cols_ || y.size() != rows_)
    {
      throw ArgumentError("CSR apply size mismatch");
    }
    for (std::size_t r = 0; r < rows_; ++r)
    {
      double s = 0.0;
      for (std::size_t k = ptr_[r]; k < ptr_[r + 1]; ++k)
      {
        s += val_[k] * x[idx_[k]];
      }
      y[r] = s;
    }
  }

  Vector diagonal() const
  {
    Vector d(std::min(rows_, cols_), 0.0);
    for (std::size_t r = 0; r < d.size(); ++r)
    {
      d[r] = at(r, r);
    }
    return d;
  }

  CsrMatrix transposed() const
  {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r)
    {
      for (std::size_t k = ptr_[r]; k < ptr_[r + 1]; ++k)
      {
        t.push_back({idx_[k], r, val_[k]});
      }
    }
    return CsrMatrix(cols_, rows_, std::move(t));
  }

  // this * diag(d) * other
  CsrMatrix multiply(const CsrMatrix &other, std::span<const double> d = {}) const
  {
    if (cols_ != other.rows_)
    {
      throw ArgumentError("CSR product shape mismatch");
    }
    std::vector<Triplet> t;
    Vector acc(other.cols_, 0.0);
    std::vector<char> used(other.cols_, 0);
    std::vector<std::size_t> touched;
    for (std::size_t r = 0; r < rows_; ++r)
    {
      touched.clear();
      for (std::size_t k = ptr_[r]; k < ptr_[r + 1]; ++k)
      {
        const std::size_t mid = idx_[k];
        const double a = val_[k] * (d.empty() ? 1.0 : d[mid]);
        for (std::size_t q = other.ptr_[mid]; q < other.ptr_[mid + 1]; ++q)
        {
          const std::size_t c = other.idx_[q];
          if (!used[c])
          {
            used[c] = 1;
            touched.push_back(c);
          }
          acc[c] += a * other.val_[q];
        }
      }
      for (auto c : touched)
      {
        t.push_back({r, c, acc[c]});
        acc[c] = 0.0;
        used[c] = 0;
      }
    }
    return CsrMatrix(rows_, other.cols_, std::move(t));
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> ptr_{0};
  std::vector<std::size_t> idx_;
  std::vector<double> val_;
};

}  // namespace agca
