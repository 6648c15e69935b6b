#include "fastcav/error.hpp"

namespace fastcav {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return "io";
    case ErrorCode::BadMagic: return "bad-magic";
    case ErrorCode::UnsupportedVersion: return "unsupported-version";
    case ErrorCode::UnsupportedDtype: return "unsupported-dtype";
    case ErrorCode::BadRank: return "bad-rank";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::NonFinite: return "non-finite";
    case ErrorCode::Overflow: return "overflow";
    case ErrorCode::ManifestFormat: return "manifest-format";
    case ErrorCode::MissingFile: return "missing-file";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::DuplicateName: return "duplicate-name";
    case ErrorCode::ZeroDirection: return "zero-direction";
    case ErrorCode::SingularCovariance: return "singular-covariance";
    case ErrorCode::NotPositiveDefinite: return "not-positive-definite";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::WrongMethod: return "wrong-method";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::ParallelRefused: return "parallel-refused";
    case ErrorCode::DegenerateGrid: return "degenerate-grid";
    case ErrorCode::Usage: return "usage";
  }
  return "unknown";
}

}  // namespace fastcav
