#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fastcav {

/// Dense n x d row-major matrix of layer activations (or gradients), one row
/// per input. Always non-empty and finite; constructors enforce this.
class ActivationMatrix {
 public:
  /// Zero-filled matrix.
  ActivationMatrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of row-major `values`; throws on size mismatch or NaN/Inf.
  ActivationMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static ActivationMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// Rows [begin, end) as a new matrix.
  ActivationMatrix slice_rows(std::size_t begin, std::size_t end) const;
  /// Rows at the given indices, in order.
  ActivationMatrix gather_rows(std::span<const std::size_t> indices) const;

  /// Throws NonFinite if any entry is NaN or Inf. Call after mutating in place.
  void check_finite() const;

  friend bool operator==(const ActivationMatrix&, const ActivationMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// Rows of `a` followed by rows of `b`.
ActivationMatrix stack_rows(const ActivationMatrix& a, const ActivationMatrix& b);

}  // namespace fastcav
