#include "fastcav/fit.hpp"

namespace fastcav {

Cav fit_method(Method method, const ConceptDataset& ds, const FitSettings& settings, std::uint64_t seed) {
  switch (method) {
    case Method::FastCav:
      return fit_fastcav(ds, settings.fastcav);
    case Method::SvmSgd: {
      SgdConfig cfg = settings.sgd;
      cfg.shuffle_seed = seed;
      return fit_svm_sgd(ds, cfg);
    }
    case Method::Lda:
      return fit_lda(ds, settings.lda);
    case Method::Ridge:
      return fit_ridge(ds, settings.ridge_lambda);
    case Method::LogReg:
      return fit_logreg(ds, settings.logreg_lambda, settings.logreg_epochs, seed);
    case Method::SparseLogReg:
      return fit_sparse_logreg(ds, settings.sparse_lambda1, settings.logreg_epochs, seed);
  }
  return fit_fastcav(ds, settings.fastcav);
}

}  // namespace fastcav
