#include "fastcav/cav_io.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "fastcav/baselines.hpp"
#include "fastcav/tensor_io.hpp"
#include "support.hpp"

namespace fastcav {
namespace {

TEST(CavIo, RoundTripKeepsDirectionInterceptAndMetadata) {
  test::TempDir dir;
  const ConceptDataset ds(test::random_matrix(20, 6, 1, 0.0, 2.0), test::random_matrix(20, 6, 2), "stripes", "conv3");
  SgdConfig cfg;
  cfg.max_epochs = 20;
  const Cav cav = fit_svm_sgd(ds, cfg);
  save_cav(cav, dir / "c.cavk");
  EXPECT_TRUE(std::filesystem::exists(dir / "c.cavk.json"));
  EXPECT_EQ(std::filesystem::file_size(dir / "c.cavk"), 7u + 8u + 8u * 7u);

  const Cav back = load_cav(dir / "c.cavk");
  EXPECT_EQ(back.direction, cav.direction);
  EXPECT_EQ(back.intercept, cav.intercept);
  EXPECT_EQ(back.method, Method::SvmSgd);
  EXPECT_EQ(back.concept_name, "stripes");
  EXPECT_EQ(back.layer, "conv3");
  EXPECT_EQ(back.meta.iterations, cav.meta.iterations);
  EXPECT_EQ(back.meta.weight_norm, cav.meta.weight_norm);
  EXPECT_EQ(support_vector_ratio(back, ds).concept_ratio, support_vector_ratio(cav, ds).concept_ratio);
}

TEST(CavIo, SidecarIsOptional) {
  test::TempDir dir;
  const double v[] = {0.6, 0.8, -1.5};
  write_vector(v, Dtype::Float64, dir / "bare.cavk");
  const Cav cav = load_cav(dir / "bare.cavk");
  EXPECT_EQ(cav.direction, (std::vector<double>{0.6, 0.8}));
  EXPECT_EQ(cav.intercept, -1.5);
  EXPECT_EQ(cav.method, Method::FastCav);
  EXPECT_TRUE(cav.concept_name.empty());
}

TEST(CavIo, Errors) {
  test::TempDir dir;
  write_tensor(ActivationMatrix::from_rows({{1, 2}, {3, 4}}), Dtype::Float64, dir / "matrix.cavk");
  EXPECT_CODE(load_cav(dir / "matrix.cavk"), ErrorCode::ShapeMismatch);
  const double one[] = {1.0};
  write_vector(one, Dtype::Float64, dir / "short.cavk");
  EXPECT_CODE(load_cav(dir / "short.cavk"), ErrorCode::ShapeMismatch);

  const double v[] = {1.0, 0.0};
  write_vector(v, Dtype::Float64, dir / "bad.cavk");
  std::ofstream(dir / "bad.cavk.json") << "{ nope";
  EXPECT_CODE(load_cav(dir / "bad.cavk"), ErrorCode::ManifestFormat);
  std::ofstream(dir / "bad.cavk.json", std::ios::trunc) << R"({"method": "kmeans"})";
  EXPECT_CODE(load_cav(dir / "bad.cavk"), ErrorCode::ManifestFormat);
  EXPECT_CODE(save_cav(Cav{}, dir / "empty.cavk"), ErrorCode::InvalidArgument);
}

}  // namespace
}  // namespace fastcav
