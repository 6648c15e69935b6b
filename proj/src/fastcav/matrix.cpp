#include "fastcav/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastcav/error.hpp"

namespace fastcav {

namespace {

void check_shape(std::size_t rows, std::size_t cols) {
  require(rows >= 1 && cols >= 1, ErrorCode::ShapeMismatch,
          "activation matrix must be at least 1x1, got " + std::to_string(rows) + "x" +
              std::to_string(cols));
}

}  // namespace

ActivationMatrix::ActivationMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
  check_shape(rows, cols);
  values_.assign(rows * cols, 0.0);
}

ActivationMatrix::ActivationMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  check_shape(rows, cols);
  require(values_.size() == rows * cols, ErrorCode::ShapeMismatch,
          "expected " + std::to_string(rows * cols) + " values for " + std::to_string(rows) + "x" +
              std::to_string(cols) + ", got " + std::to_string(values_.size()));
  check_finite();
}

ActivationMatrix ActivationMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  require(!rows.empty(), ErrorCode::ShapeMismatch, "no rows");
  const std::size_t d = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (const auto& r : rows) {
    require(r.size() == d, ErrorCode::ShapeMismatch, "ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return ActivationMatrix(rows.size(), d, std::move(flat));
}

ActivationMatrix ActivationMatrix::slice_rows(std::size_t begin, std::size_t end) const {
  require(begin < end && end <= rows_, ErrorCode::InvalidArgument, "bad row slice");
  std::vector<double> out(values_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
                          values_.begin() + static_cast<std::ptrdiff_t>(end * cols_));
  return ActivationMatrix(end - begin, cols_, std::move(out));
}

ActivationMatrix ActivationMatrix::gather_rows(std::span<const std::size_t> indices) const {
  require(!indices.empty(), ErrorCode::InvalidArgument, "empty row selection");
  ActivationMatrix out(indices.size(), cols_);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    require(indices[k] < rows_, ErrorCode::InvalidArgument, "row index out of range");
    const auto src = row(indices[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  return out;
}

void ActivationMatrix::check_finite() const {
  const auto it = std::find_if(values_.begin(), values_.end(),
                               [](double v) { return !std::isfinite(v); });
  if (it != values_.end()) {
    const auto pos = static_cast<std::size_t>(it - values_.begin());
    fail(ErrorCode::NonFinite, "non-finite value at row " + std::to_string(pos / cols_) +
                                   ", column " + std::to_string(pos % cols_));
  }
}

ActivationMatrix stack_rows(const ActivationMatrix& a, const ActivationMatrix& b) {
  require(a.cols() == b.cols(), ErrorCode::DimensionMismatch, "cannot stack matrices of different width");
  std::vector<double> flat;
  flat.reserve(a.values().size() + b.values().size());
  flat.insert(flat.end(), a.values().begin(), a.values().end());
  flat.insert(flat.end(), b.values().begin(), b.values().end());
  return ActivationMatrix(a.rows() + b.rows(), a.cols(), std::move(flat));
}

}  // namespace fastcav
