#pragma once

#include <cstdint>

#include "fastcav/baselines.hpp"
#include "fastcav/cav.hpp"

namespace fastcav {

/// Settings for every fitting method, with the documented defaults.
struct FitSettings {
  FastCavOptions fastcav{};
  SgdConfig sgd{};
  LdaConfig lda{};
  double ridge_lambda = 1.0;
  double logreg_lambda = 1e-4;
  double sparse_lambda1 = 1e-3;
  std::uint32_t logreg_epochs = 1000;

  /// True when any fit would run internal worker threads.
  bool internally_parallel() const noexcept { return fastcav.threads > 1; }
};

/// Fits `method` on `ds`. `seed` drives the SGD shuffles (ignored by the
/// closed-form methods).
Cav fit_method(Method method, const ConceptDataset& ds, const FitSettings& settings = {},
               std::uint64_t seed = 0);

}  // namespace fastcav
