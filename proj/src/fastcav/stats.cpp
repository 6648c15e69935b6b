#include "fastcav/stats.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "fastcav/error.hpp"
#include "fastcav/numeric.hpp"

namespace fastcav {

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  require(a.size() >= 2 && b.size() >= 2, ErrorCode::InvalidArgument,
          "Welch t-test needs at least two values per sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = pairwise_sum(a) / na;
  const double mb = pairwise_sum(b) / nb;
  const double va = sample_variance(a) / na;
  const double vb = sample_variance(b) / nb;
  const double se2 = va + vb;

  WelchResult r;
  if (se2 == 0.0) {
    r.df = na + nb - 2.0;
    if (ma == mb) {
      r.t = 0.0;
      r.p_value = 1.0;
    } else {
      r.t = ma > mb ? INFINITY : -INFINITY;
      r.p_value = 0.0;
    }
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / ((va * va) / (na - 1.0) + (vb * vb) / (nb - 1.0));
  const boost::math::students_t dist(r.df);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t))));
  return r;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double student_t_quantile(double level, double df) {
  require(level > 0.0 && level < 1.0 && df > 0.0, ErrorCode::InvalidArgument, "bad t quantile request");
  const boost::math::students_t dist(df);
  return boost::math::quantile(dist, 0.5 + level / 2.0);
}

}  // namespace fastcav
