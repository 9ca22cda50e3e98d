#include <cmath>
#include <numeric>

#include "doctest.h"
#include "scenegen/prob.hpp"

using namespace scenegen;
using namespace scenegen::prob;

namespace {

// Truncated power series for I0; the oracle the implementation is checked
// against, kept deliberately separate from the library path.
double bessel_i0_series(double kappa) {
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 5000; ++m) {
    term *= (kappa * kappa / 4.0) / (static_cast<double>(m) * m);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

// Trapezoid integral of exp(logpdf) over [lo, hi].
template <typename F>
double integrate(F logpdf, double lo, double hi, int n = 10000) {
  double acc = 0.0;
  const double h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w * std::exp(logpdf(x));
  }
  return acc * h;
}

}  // namespace

TEST_CASE("categorical fit from counts") {
  const auto c = categorical_fit({{"u1", 3}, {"u2", 1}});
  CHECK(c.prob("u1") == doctest::Approx(0.75));
  CHECK(c.prob("u2") == doctest::Approx(0.25));

  const auto single = categorical_fit({{"u1", 5}});
  CHECK(single.prob("u1") == doctest::Approx(1.0));

  const auto three = categorical_fit({{"a", 2}, {"b", 2}, {"c", 4}});
  CHECK(three.prob("a") == doctest::Approx(0.25));
  CHECK(three.prob("b") == doctest::Approx(0.25));
  CHECK(three.prob("c") == doctest::Approx(0.5));

  CHECK_THROWS_AS(categorical_fit({{"a", 0}}), Error);
}

TEST_CASE("categorical probabilities sum to one") {
  RandomStream rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::string, std::int64_t> counts;
    const int k = 1 + rng.uniform_int(8);
    for (int i = 0; i < k; ++i)
      counts["c" + std::to_string(i)] = 1 + rng.uniform_int(1000);
    const auto c = categorical_fit(counts);
    const double sum = std::accumulate(c.probs.begin(), c.probs.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("lognormal: degenerate samples clamp sigma") {
  const double e = std::exp(1.0);
  const auto d = lognormal_fit(std::vector<double>{e, e, e});
  CHECK(d.mu == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.sigma == doctest::Approx(kSigmaMin));
}

TEST_CASE("lognormal: standard logpdf at x=1") {
  const LogNormalDist d{0.0, 1.0};
  CHECK(lognormal_logpdf(d, 1.0) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-12));
  CHECK(lognormal_logpdf(d, 0.0) == -std::numeric_limits<double>::infinity());
  CHECK(lognormal_logpdf(d, -3.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("lognormal: fit requires two samples") {
  CHECK_THROWS_AS(lognormal_fit(std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(lognormal_fit(std::vector<double>{1.0, -1.0}), Error);
}

TEST_CASE("lognormal: fit-sample round trip") {
  const LogNormalDist truth{0.5, 0.3};
  RandomStream rng(12);
  std::vector<double> samples(100000);
  for (auto& s : samples) s = lognormal_sample(truth, rng);
  const auto fit = lognormal_fit(samples);
  CHECK(std::abs(fit.mu - truth.mu) / truth.mu < 0.02);
  CHECK(std::abs(fit.sigma - truth.sigma) / truth.sigma < 0.02);
}

TEST_CASE("lognormal density integrates to one") {
  const LogNormalDist d{0.2, 0.6};
  const double total =
      integrate([&](double x) { return lognormal_logpdf(d, x); }, 1e-6, 30.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("bessel i0 against the series oracle") {
  CHECK(bessel_i0(0.0) == doctest::Approx(1.0));
  CHECK(bessel_i0(1.0) == doctest::Approx(1.266066).epsilon(1e-6));
  CHECK(bessel_i0(10.0) == doctest::Approx(2815.72).epsilon(1e-5));
  for (double kappa = 0.0; kappa <= 50.0; kappa += 0.5) {
    const double oracle = bessel_i0_series(kappa);
    CHECK(std::abs(bessel_i0(kappa) - oracle) <= 1e-10 * oracle);
  }
}

TEST_CASE("von mises: zero concentration is the uniform circle") {
  const VonMisesMixture d{{{1.0, 0.0, 0.0}}};
  for (double theta : {0.0, 1.0, 3.0, 6.0})
    CHECK(vonmises_logpdf(d, theta) ==
          doctest::Approx(-std::log(kTwoPi)).epsilon(1e-12));
}

TEST_CASE("von mises: logpdf at the mode") {
  const VonMisesMixture d{{{1.0, 1.0, 2.0}}};
  const double expected = 2.0 - std::log(kTwoPi * bessel_i0_series(2.0));
  CHECK(vonmises_logpdf(d, 1.0) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("von mises: periodicity") {
  const VonMisesMixture d{{{0.6, 1.0, 2.0}, {0.4, 4.0, 0.7}}};
  for (double theta : {0.0, 0.5, 2.0, 5.5}) {
    CHECK(vonmises_logpdf(d, theta) == vonmises_logpdf(d, wrap_angle(theta)));
    CHECK(vonmises_logpdf(d, theta + kTwoPi) ==
          doctest::Approx(vonmises_logpdf(d, theta)).epsilon(1e-12));
  }
}

TEST_CASE("von mises: fit-sample round trip") {
  const VonMisesMixture truth{{{1.0, kPi / 3, 4.0}}};
  RandomStream rng(13);
  std::vector<double> samples(100000);
  for (auto& s : samples) s = vonmises_sample(truth, rng);
  const auto fit = vonmises_fit(samples, 1);
  REQUIRE(fit.components.size() == 1);
  CHECK(std::abs(wrap_signed(fit.components[0].mu - kPi / 3)) < 0.02);
  CHECK(std::abs(fit.components[0].kappa - 4.0) / 4.0 < 0.10);
}

TEST_CASE("von mises: empty input and short input rejected") {
  CHECK_THROWS_AS(vonmises_fit(std::vector<double>{}, 1), Error);
  CHECK_THROWS_AS(vonmises_fit(std::vector<double>{0.1, 0.2}, 1), Error);
}

TEST_CASE("von mises: mixture density integrates to one") {
  const VonMisesMixture d{{{0.5, 0.5, 3.0}, {0.5, 3.5, 1.0}}};
  const double total =
      integrate([&](double t) { return vonmises_logpdf(d, t); }, 0.0, kTwoPi);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("von mises: EM recovers a well-separated two-mode mixture") {
  const VonMisesMixture truth{{{0.5, 1.0, 8.0}, {0.5, 4.0, 8.0}}};
  RandomStream rng(14);
  std::vector<double> samples(20000);
  for (auto& s : samples) s = vonmises_sample(truth, rng);
  const auto fit = vonmises_fit(samples, 2);
  REQUIRE(fit.components.size() == 2);
  // Each true mode should be near one fitted mean.
  for (double mode : {1.0, 4.0}) {
    double best = 10.0;
    for (const auto& c : fit.components)
      best = std::min(best, std::abs(wrap_signed(c.mu - mode)));
    CHECK(best < 0.1);
  }
  const double total =
      integrate([&](double t) { return vonmises_logpdf(fit, t); }, 0.0,
                kTwoPi);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("kde: single-sample peak density") {
  Eigen::MatrixXd samples(1, 1);
  samples << 2.0;
  Eigen::VectorXd h(1);
  h << 0.4;
  const auto d = kde_fit_fixed(samples, h);
  const double expected = 1.0 / (0.4 * std::sqrt(kTwoPi));
  Eigen::VectorXd x(1);
  x << 2.0;
  CHECK(std::exp(kde_logpdf(d, x)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kde: two-kernel average") {
  Eigen::MatrixXd samples(2, 1);
  samples << 0.0, 2.0;
  Eigen::VectorXd h(1);
  h << 1.0;
  const auto d = kde_fit_fixed(samples, h);
  Eigen::VectorXd x(1);
  x << 1.0;
  const double expected = std::exp(-0.5) / std::sqrt(kTwoPi);
  CHECK(std::exp(kde_logpdf(d, x)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kde: dimension mismatch is rejected") {
  Eigen::MatrixXd samples(2, 2);
  samples << 0, 0, 1, 1;
  const auto d = kde_fit(samples);
  Eigen::VectorXd x(3);
  x << 0, 0, 0;
  CHECK_THROWS_AS(kde_logpdf(d, x), Error);
}

TEST_CASE("kde: silverman bandwidth floors on constant data") {
  Eigen::MatrixXd samples(10, 1);
  samples.setConstant(3.0);
  const auto d = kde_fit(samples);
  CHECK(d.bandwidths[0] == doctest::Approx(kBandwidthMin));
}

TEST_CASE("kde: logpdf invariant under sample permutation") {
  RandomStream rng(15);
  Eigen::MatrixXd samples(20, 2);
  for (Eigen::Index i = 0; i < samples.size(); ++i)
    samples.data()[i] = rng.uniform(-1.0, 1.0);
  Eigen::MatrixXd shuffled = samples.colwise().reverse();
  const auto a = kde_fit(samples);
  const auto b = kde_fit(shuffled);
  Eigen::VectorXd x(2);
  x << 0.3, -0.2;
  CHECK(kde_logpdf(a, x) == doctest::Approx(kde_logpdf(b, x)).epsilon(1e-12));
}

TEST_CASE("kde: sampler mean matches data mean") {
  RandomStream rng(16);
  Eigen::MatrixXd samples(50, 1);
  for (Eigen::Index i = 0; i < 50; ++i) samples(i, 0) = rng.uniform(0.0, 4.0);
  const auto d = kde_fit(samples);
  const int n = 100000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += kde_sample(d, rng)[0];
  const double mean = acc / n;
  const double data_mean = samples.mean();
  const double data_var =
      (samples.array() - data_mean).square().sum() / 50.0 +
      d.bandwidths[0] * d.bandwidths[0];
  const double se = std::sqrt(data_var / n);
  CHECK(std::abs(mean - data_mean) < 3.0 * se);
}

TEST_CASE("kde: density integrates to one") {
  RandomStream rng(17);
  Eigen::MatrixXd samples(15, 1);
  for (Eigen::Index i = 0; i < 15; ++i) samples(i, 0) = rng.uniform(0.0, 2.0);
  const auto d = kde_fit(samples);
  const double total = integrate(
      [&](double x) {
        Eigen::VectorXd q(1);
        q << x;
        return kde_logpdf(d, q);
      },
      -10.0, 12.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("kappa from resultant spans the approximation branches") {
  CHECK(kappa_from_resultant(0.0) == doctest::Approx(0.0));
  CHECK(kappa_from_resultant(0.3) == doctest::Approx(0.6 + 0.027 + (5.0 / 6.0) * std::pow(0.3, 5)));
  CHECK(kappa_from_resultant(0.9999999) == doctest::Approx(kKappaMax));
  // Monotone on a grid.
  double prev = -1.0;
  for (double r = 0.0; r < 1.0; r += 0.01) {
    const double k = kappa_from_resultant(r);
    CHECK(k >= prev - 1e-12);
    prev = k;
  }
}
