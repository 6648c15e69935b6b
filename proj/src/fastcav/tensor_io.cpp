#include "fastcav/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "fastcav/error.hpp"

namespace fastcav {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'C', 'A', 'V', 'K'};
constexpr std::size_t kPrefixBytes = 7;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

// Validates the fixed prefix and shape. `available` is the total byte count
// of the file or buffer, used to reject truncated or oversized payloads.
TensorHeader parse_header(std::span<const std::uint8_t> bytes, std::uint64_t available,
                          const std::string& where) {
  require(bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0, ErrorCode::BadMagic,
          where + ": missing CAVK magic");
  require(bytes.size() >= kPrefixBytes, ErrorCode::ShapeMismatch, where + ": truncated header");
  TensorHeader h;
  h.version = bytes[4];
  require(h.version == kTensorVersion, ErrorCode::UnsupportedVersion,
          where + ": unsupported CAVK version " + std::to_string(h.version));
  require(bytes[5] <= 1, ErrorCode::UnsupportedDtype,
          where + ": unsupported dtype code " + std::to_string(bytes[5]));
  h.dtype = static_cast<Dtype>(bytes[5]);
  h.rank = bytes[6];
  require(h.rank == 1 || h.rank == 2, ErrorCode::BadRank,
          where + ": rank must be 1 or 2, got " + std::to_string(h.rank));
  require(bytes.size() >= kPrefixBytes + 8u * h.rank, ErrorCode::ShapeMismatch,
          where + ": truncated shape");
  std::uint64_t count = 1;
  for (std::uint8_t i = 0; i < h.rank; ++i) {
    const std::uint64_t dim = get_u64(bytes.data() + kPrefixBytes + 8 * i);
    require(dim >= 1, ErrorCode::ShapeMismatch, where + ": zero-length dimension");
    require(count <= std::numeric_limits<std::uint64_t>::max() / dim, ErrorCode::ShapeMismatch,
            where + ": shape overflows");
    count *= dim;
    h.shape.push_back(dim);
  }
  const std::uint64_t expected = h.header_bytes() + count * dtype_size(h.dtype);
  require(available == expected, ErrorCode::ShapeMismatch,
          where + ": header declares " + std::to_string(count) + " scalars (" +
              std::to_string(expected) + " bytes) but file holds " + std::to_string(available) +
              " bytes");
  return h;
}

ActivationMatrix decode_payload(const TensorHeader& h, const std::uint8_t* p) {
  const std::size_t n = static_cast<std::size_t>(h.element_count());
  std::vector<double> values(n);
  if (h.dtype == Dtype::Float64) {
    for (std::size_t i = 0; i < n; ++i) values[i] = std::bit_cast<double>(get_u64(p + 8 * i));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = static_cast<double>(std::bit_cast<float>(get_u32(p + 4 * i)));
    }
  }
  return ActivationMatrix(static_cast<std::size_t>(h.rows()), static_cast<std::size_t>(h.cols()),
                          std::move(values));
}

std::vector<std::uint8_t> read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  require(static_cast<bool>(in), ErrorCode::Io, "read failed: " + path.string());
  return bytes;
}

void write_all(const fs::path& path, std::span<const std::uint8_t> bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot open for writing: " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    require(static_cast<bool>(out), ErrorCode::Io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  require(!ec, ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace

std::size_t dtype_size(Dtype dtype) noexcept { return dtype == Dtype::Float32 ? 4 : 8; }

std::uint64_t TensorHeader::element_count() const noexcept {
  std::uint64_t n = 1;
  for (auto dim : shape) n *= dim;
  return n;
}

TensorHeader read_tensor_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  std::uint8_t buf[kPrefixBytes + 16] = {};
  in.read(reinterpret_cast<char*>(buf), sizeof buf);
  const auto got = static_cast<std::size_t>(in.gcount());
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  require(!ec, ErrorCode::Io, "cannot stat " + path.string());
  return parse_header({buf, got}, size, path.string());
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  TensorHeader h = parse_header(bytes, bytes.size(), "<buffer>");
  ActivationMatrix values = decode_payload(h, bytes.data() + h.header_bytes());
  return Tensor{std::move(h), std::move(values)};
}

Tensor read_tensor_file(const fs::path& path) {
  const auto bytes = read_all(path);
  TensorHeader h = parse_header(bytes, bytes.size(), path.string());
  try {
    ActivationMatrix values = decode_payload(h, bytes.data() + h.header_bytes());
    return Tensor{std::move(h), std::move(values)};
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

ActivationMatrix read_tensor(const fs::path& path) { return read_tensor_file(path).values; }

std::vector<std::uint8_t> encode_tensor(const ActivationMatrix& values, Dtype dtype, std::uint8_t rank) {
  require(rank == 1 || rank == 2, ErrorCode::BadRank, "rank must be 1 or 2");
  require(rank == 2 || values.rows() == 1, ErrorCode::ShapeMismatch,
          "rank-1 tensors hold a single row");
  values.check_finite();
  const auto data = values.values();
  std::vector<std::uint8_t> out;
  out.reserve(7 + 8 * rank + data.size() * dtype_size(dtype));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kTensorVersion);
  out.push_back(static_cast<std::uint8_t>(dtype));
  out.push_back(rank);
  if (rank == 2) put_u64(out, values.rows());
  put_u64(out, values.cols());
  if (dtype == Dtype::Float64) {
    for (double v : data) put_u64(out, std::bit_cast<std::uint64_t>(v));
  } else {
    constexpr double kMax = std::numeric_limits<float>::max();
    for (std::size_t i = 0; i < data.size(); ++i) {
      require(std::fabs(data[i]) <= kMax, ErrorCode::Overflow,
              "value " + std::to_string(data[i]) + " at index " + std::to_string(i) +
                  " overflows float32");
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(data[i])));
    }
  }
  return out;
}

void write_tensor(const ActivationMatrix& m, Dtype dtype, const fs::path& path) {
  write_all(path, encode_tensor(m, dtype, 2));
}

void write_vector(std::span<const double> v, Dtype dtype, const fs::path& path) {
  ActivationMatrix row(1, v.size(), std::vector<double>(v.begin(), v.end()));
  write_all(path, encode_tensor(row, dtype, 1));
}

void write_tensor_file(const Tensor& t, const fs::path& path) {
  write_all(path, encode_tensor(t.values, t.header.dtype, t.header.rank));
}

}  // namespace fastcav
