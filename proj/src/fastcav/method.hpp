#pragma once

#include <optional>
#include <string_view>

namespace fastcav {

enum class Method { FastCav, SvmSgd, Lda, Ridge, LogReg, SparseLogReg };

constexpr std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::FastCav: return "fastcav";
    case Method::SvmSgd: return "svm";
    case Method::Lda: return "lda";
    case Method::Ridge: return "ridge";
    case Method::LogReg: return "logreg";
    case Method::SparseLogReg: return "sparse_logreg";
  }
  return "unknown";
}

/// Accepts the canonical names plus "svm_sgd" and "svm-sgd".
constexpr std::optional<Method> parse_method(std::string_view s) noexcept {
  if (s == "fastcav") return Method::FastCav;
  if (s == "svm" || s == "svm_sgd" || s == "svm-sgd") return Method::SvmSgd;
  if (s == "lda") return Method::Lda;
  if (s == "ridge") return Method::Ridge;
  if (s == "logreg") return Method::LogReg;
  if (s == "sparse_logreg" || s == "sparse-logreg") return Method::SparseLogReg;
  return std::nullopt;
}

}  // namespace fastcav
