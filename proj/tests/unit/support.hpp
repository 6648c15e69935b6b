#pragma once

// Shared helpers and reference oracles for the unit tests. The oracles are
// deliberately naive (long double loops, dense Eigen solves, closed forms) so
// they share no code path with the library under test.

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <unistd.h>
#include <string>
#include <vector>

#include "fastcav/cav.hpp"
#include "fastcav/error.hpp"
#include "fastcav/matrix.hpp"

namespace fastcav::test {

#define EXPECT_CODE(stmt, expected_code)                                        \
  do {                                                                          \
    try {                                                                       \
      stmt;                                                                     \
      ADD_FAILURE() << "expected " << ::fastcav::to_string(expected_code);      \
    } catch (const ::fastcav::Error& e) {                                       \
      EXPECT_EQ(e.code(), expected_code) << e.what();                           \
    }                                                                           \
  } while (0)

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = info ? std::string(info->test_suite_name()) + "_" + info->name() : "fastcav";
    for (char& c : name) {
      if (c == '/') c = '_';
    }
    path_ = std::filesystem::temp_directory_path() / ("fastcav_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::uint8_t> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

/// Random matrix from std::mt19937_64, independent of the library generator.
inline ActivationMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = -1.0,
                                      double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = dist(gen);
  return ActivationMatrix(rows, cols, std::move(v));
}

// ---- oracles --------------------------------------------------------------

inline std::vector<double> naive_column_mean(const ActivationMatrix& m) {
  std::vector<double> out(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, j);
    out[j] = static_cast<double>(s / static_cast<long double>(m.rows()));
  }
  return out;
}

inline std::vector<double> naive_pooled_mean(const ActivationMatrix& a, const ActivationMatrix& b) {
  std::vector<double> out(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i) s += b(i, j);
    out[j] = static_cast<double>(s / static_cast<long double>(a.rows() + b.rows()));
  }
  return out;
}

inline std::vector<double> normalized(std::vector<double> v) {
  long double s = 0.0L;
  for (double x : v) s += static_cast<long double>(x) * x;
  const double n = static_cast<double>(std::sqrt(s));
  for (double& x : v) x /= n;
  return v;
}

inline double naive_cos(const std::vector<double>& a, const std::vector<double>& b) {
  long double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<long double>(a[i]) * b[i];
    aa += static_cast<long double>(a[i]) * a[i];
    bb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(ab / std::sqrt(aa * bb));
}

inline Eigen::MatrixXd to_eigen(const ActivationMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

/// Direction of (S_w + ridge I)^+ (mu_c - mu_r) with S_w formed densely
/// (divisor n - 2) and a complete orthogonal decomposition pseudo-inverse.
inline std::vector<double> dense_lda_direction(const ConceptDataset& ds, double ridge) {
  const Eigen::MatrixXd c = to_eigen(ds.concept_acts());
  const Eigen::MatrixXd r = to_eigen(ds.random_acts());
  const Eigen::RowVectorXd mc = c.colwise().mean();
  const Eigen::RowVectorXd mr = r.colwise().mean();
  const Eigen::MatrixXd cc = c.rowwise() - mc;
  const Eigen::MatrixXd rc = r.rowwise() - mr;
  const double dof = static_cast<double>(c.rows() + r.rows() - 2);
  Eigen::MatrixXd s = (cc.transpose() * cc + rc.transpose() * rc) / dof;
  s.diagonal().array() += ridge;
  const Eigen::VectorXd w = s.completeOrthogonalDecomposition().solve((mc - mr).transpose());
  return normalized(std::vector<double>(w.data(), w.data() + w.size()));
}

/// Centered least squares on +-1 labels, solved densely in the primal.
inline std::vector<double> dense_ridge_direction(const ConceptDataset& ds, double lambda) {
  const Eigen::MatrixXd c = to_eigen(ds.concept_acts());
  const Eigen::MatrixXd r = to_eigen(ds.random_acts());
  Eigen::MatrixXd x(c.rows() + r.rows(), c.cols());
  x << c, r;
  Eigen::VectorXd y(x.rows());
  y.head(c.rows()).setOnes();
  y.tail(r.rows()).setConstant(-1.0);
  const Eigen::RowVectorXd mx = x.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - mx;
  const Eigen::VectorXd yc = y.array() - y.mean();
  Eigen::MatrixXd a = xc.transpose() * xc;
  a.diagonal().array() += lambda;
  const Eigen::VectorXd w = a.completeOrthogonalDecomposition().solve(xc.transpose() * yc);
  return normalized(std::vector<double>(w.data(), w.data() + w.size()));
}

inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Welch statistic, Welch-Satterthwaite df and two-sided p-value through the
/// regularized incomplete beta function.
struct WelchOracle {
  double t, df, p;
};

inline WelchOracle welch_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  auto mv = [](const std::vector<double>& x) {
    long double m = 0;
    for (double v : x) m += v;
    m /= x.size();
    long double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return std::pair<double, double>(static_cast<double>(m), static_cast<double>(s / (x.size() - 1)));
  };
  const auto [ma, va] = mv(a);
  const auto [mb, vb] = mv(b);
  const double sa = va / a.size(), sb = vb / b.size();
  const double t = (ma - mb) / std::sqrt(sa + sb);
  const double df = (sa + sb) * (sa + sb) / (sa * sa / (a.size() - 1) + sb * sb / (b.size() - 1));
  const double p = boost::math::ibeta(df / 2.0, 0.5, df / (df + t * t));
  return {t, df, p};
}

/// Margin count straight from the definition, using the raw classifier.
inline double margin_fraction(const Cav& cav, const ActivationMatrix& m, double y, double slack) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    long double s = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += static_cast<long double>(cav.direction[j]) * m(i, j);
    const double margin = y * cav.meta.weight_norm * static_cast<double>(s + cav.intercept);
    if (margin <= 1.0 + slack) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(m.rows());
}

}  // namespace fastcav::test
