#pragma once

// CAVK tensor files.
//
//   offset  size       field
//   0       4          magic "CAVK"
//   4       1          version (1)
//   5       1          dtype (0 = float32, 1 = float64)
//   6       1          rank (1 or 2)
//   7       8 * rank   shape, u64 little-endian
//   ...                payload, row-major little-endian IEEE-754
//
// The file ends exactly at the end of the payload.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fastcav/matrix.hpp"

namespace fastcav {

enum class Dtype : std::uint8_t { Float32 = 0, Float64 = 1 };

inline constexpr std::uint8_t kTensorVersion = 1;

std::size_t dtype_size(Dtype dtype) noexcept;

struct TensorHeader {
  std::uint8_t version = kTensorVersion;
  Dtype dtype = Dtype::Float64;
  std::uint8_t rank = 2;
  std::vector<std::uint64_t> shape;

  std::size_t header_bytes() const noexcept { return 7 + 8 * shape.size(); }
  std::uint64_t element_count() const noexcept;
  std::uint64_t payload_bytes() const noexcept { return element_count() * dtype_size(dtype); }
  /// Sample count; 1 for rank-1 tensors.
  std::uint64_t rows() const noexcept { return rank == 1 ? 1 : shape[0]; }
  std::uint64_t cols() const noexcept { return shape.back(); }
};

/// Rank-1 tensors load as a 1 x d matrix; `header` keeps the on-disk layout.
struct Tensor {
  TensorHeader header;
  ActivationMatrix values;
};

/// Parses and validates the header, including that the file size matches the
/// declared shape. Does not read the payload.
TensorHeader read_tensor_header(const std::filesystem::path& path);

Tensor read_tensor_file(const std::filesystem::path& path);
ActivationMatrix read_tensor(const std::filesystem::path& path);

/// Serialized bytes of `values` with the given rank (1 requires a single row).
std::vector<std::uint8_t> encode_tensor(const ActivationMatrix& values, Dtype dtype, std::uint8_t rank);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

/// Rank-2 write. Float32 narrowing of out-of-range values throws Overflow.
void write_tensor(const ActivationMatrix& m, Dtype dtype, const std::filesystem::path& path);
/// Rank-1 write.
void write_vector(std::span<const double> v, Dtype dtype, const std::filesystem::path& path);
void write_tensor_file(const Tensor& t, const std::filesystem::path& path);

}  // namespace fastcav
