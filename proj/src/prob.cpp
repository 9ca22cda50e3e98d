#include "scenegen/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace scenegen::prob {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

double logsumexp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

double Categorical::prob(const std::string& label) const {
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    if (outcomes[i] == label) return probs[i];
  return 0.0;
}

const std::string& Categorical::sample(RandomStream& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return outcomes[i];
  }
  return outcomes.back();
}

Categorical categorical_fit(
    const std::map<std::string, std::int64_t>& counts) {
  std::int64_t total = 0;
  for (const auto& [label, c] : counts) {
    if (c < 0) throw Error("categorical_fit: negative count for " + label);
    total += c;
  }
  if (total == 0) throw Error("categorical_fit: all counts are zero");
  Categorical out;
  for (const auto& [label, c] : counts) {
    out.outcomes.push_back(label);
    out.probs.push_back(static_cast<double>(c) / static_cast<double>(total));
  }
  return out;
}

LogNormalDist lognormal_fit(std::span<const double> samples,
                            double sigma_min) {
  if (samples.size() < 2)
    throw Error("lognormal_fit: need at least 2 samples");
  double mean = 0.0;
  for (double s : samples) {
    if (s <= 0.0) throw Error("lognormal_fit: non-positive sample");
    mean += std::log(s);
  }
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) {
    const double d = std::log(s) - mean;
    var += d * d;
  }
  var /= static_cast<double>(samples.size());
  LogNormalDist d;
  d.mu = mean;
  d.sigma = std::max(std::sqrt(var), sigma_min);
  return d;
}

double lognormal_logpdf(const LogNormalDist& d, double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  const double z = (std::log(x) - d.mu) / d.sigma;
  return -std::log(x) - std::log(d.sigma) - 0.5 * kLogTwoPi - 0.5 * z * z;
}

double lognormal_sample(const LogNormalDist& d, RandomStream& rng) {
  return std::exp(d.mu + d.sigma * rng.normal());
}

double bessel_i0(double kappa) {
  if (kappa < 0.0) throw Error("bessel_i0: negative argument");
  return std::cyl_bessel_i(0.0, kappa);
}

double kappa_from_resultant(double rbar) {
  rbar = std::clamp(rbar, 0.0, 1.0 - 1e-12);
  double kappa;
  if (rbar < 0.53) {
    kappa = 2.0 * rbar + rbar * rbar * rbar +
            (5.0 / 6.0) * std::pow(rbar, 5);
  } else if (rbar < 0.85) {
    kappa = -0.4 + 1.39 * rbar + 0.43 / (1.0 - rbar);
  } else {
    const double r3 = rbar * rbar * rbar;
    kappa = 1.0 / (r3 - 4.0 * rbar * rbar + 3.0 * rbar);
  }
  return std::clamp(kappa, 0.0, kKappaMax);
}

namespace {

double component_logpdf(const VonMisesComponent& c, double theta) {
  return c.kappa * std::cos(theta - c.mu) -
         std::log(kTwoPi * bessel_i0(c.kappa));
}

VonMisesComponent fit_weighted(std::span<const double> angles,
                               std::span<const double> weights) {
  double sw = 0.0, sc = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    sw += weights[i];
    sc += weights[i] * std::cos(angles[i]);
    ss += weights[i] * std::sin(angles[i]);
  }
  VonMisesComponent out;
  if (sw <= 0.0) return out;
  const double cbar = sc / sw;
  const double sbar = ss / sw;
  out.mu = wrap_angle(std::atan2(sbar, cbar));
  out.kappa = kappa_from_resultant(std::sqrt(cbar * cbar + sbar * sbar));
  return out;
}

}  // namespace

VonMisesMixture vonmises_fit(std::span<const double> angles, int k_components,
                             int em_iters) {
  if (angles.empty()) throw Error("vonmises_fit: empty input");
  if (k_components < 1) throw Error("vonmises_fit: k_components < 1");
  if (angles.size() < static_cast<std::size_t>(5 * k_components))
    throw Error("vonmises_fit: need at least 5 angles per component");

  const std::size_t n = angles.size();
  VonMisesMixture mix;
  if (k_components == 1) {
    std::vector<double> w(n, 1.0);
    VonMisesComponent c = fit_weighted(angles, w);
    c.weight = 1.0;
    mix.components.push_back(c);
    return mix;
  }

  // Deterministic init: evenly spread means, moderate concentration.
  for (int j = 0; j < k_components; ++j) {
    VonMisesComponent c;
    c.weight = 1.0 / k_components;
    c.mu = wrap_angle(kTwoPi * (j + 0.5) / k_components);
    c.kappa = 2.0;
    mix.components.push_back(c);
  }

  std::vector<std::vector<double>> resp(
      k_components, std::vector<double>(n, 0.0));
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < em_iters; ++iter) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> lp(k_components);
      for (int j = 0; j < k_components; ++j)
        lp[j] = std::log(std::max(mix.components[j].weight, 1e-300)) +
                component_logpdf(mix.components[j], angles[i]);
      const double norm = logsumexp(lp);
      ll += norm;
      for (int j = 0; j < k_components; ++j)
        resp[j][i] = std::exp(lp[j] - norm);
    }
    for (int j = 0; j < k_components; ++j) {
      double sw = std::accumulate(resp[j].begin(), resp[j].end(), 0.0);
      VonMisesComponent c = fit_weighted(angles, resp[j]);
      c.weight = sw / static_cast<double>(n);
      if (c.weight < 1e-12) {
        // Collapsed component: keep its mean, flatten it.
        c = mix.components[j];
        c.weight = 1e-12;
        c.kappa = 0.0;
      }
      mix.components[j] = c;
    }
    // Renormalize weights.
    double tw = 0.0;
    for (const auto& c : mix.components) tw += c.weight;
    for (auto& c : mix.components) c.weight /= tw;
    if (std::abs(ll - prev_ll) < 1e-10 * (1.0 + std::abs(ll))) break;
    prev_ll = ll;
  }
  return mix;
}

double vonmises_logpdf(const VonMisesMixture& d, double theta) {
  if (d.components.empty()) throw Error("vonmises_logpdf: empty mixture");
  std::vector<double> lp(d.components.size());
  for (std::size_t j = 0; j < d.components.size(); ++j)
    lp[j] = std::log(std::max(d.components[j].weight, 1e-300)) +
            component_logpdf(d.components[j], theta);
  return logsumexp(lp);
}

namespace {

// Best-Fisher rejection sampler for a single von Mises component.
double sample_component(const VonMisesComponent& c, RandomStream& rng) {
  if (c.kappa < 1e-8) return rng.uniform(0.0, kTwoPi);
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * c.kappa * c.kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * c.kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  double f = 0.0;
  for (;;) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double z = std::cos(kPi * u1);
    f = (1.0 + r * z) / (r + z);
    const double cc = c.kappa * (r - f);
    if (cc * (2.0 - cc) - u2 > 0.0) break;
    if (u2 > 0.0 && std::log(cc / u2) + 1.0 - cc >= 0.0) break;
  }
  const double u3 = rng.uniform();
  const double sign = (u3 < 0.5) ? -1.0 : 1.0;
  return wrap_angle(c.mu + sign * std::acos(std::clamp(f, -1.0, 1.0)));
}

}  // namespace

double vonmises_sample(const VonMisesMixture& d, RandomStream& rng) {
  if (d.components.empty()) throw Error("vonmises_sample: empty mixture");
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t pick = d.components.size() - 1;
  for (std::size_t j = 0; j < d.components.size(); ++j) {
    acc += d.components[j].weight;
    if (u < acc) {
      pick = j;
      break;
    }
  }
  return sample_component(d.components[pick], rng);
}

KDEDist kde_fit(const Eigen::MatrixXd& samples, double bandwidth_floor) {
  if (samples.rows() < 1) throw Error("kde_fit: no samples");
  const auto n = samples.rows();
  const auto d = samples.cols();
  Eigen::VectorXd bw(d);
  const double scale = 1.06 * std::pow(static_cast<double>(n), -0.2);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double mean = samples.col(j).mean();
    const double var =
        (samples.col(j).array() - mean).square().sum() / static_cast<double>(n);
    bw[j] = std::max(bandwidth_floor, scale * std::sqrt(var));
  }
  return KDEDist{samples, bw};
}

KDEDist kde_fit_fixed(const Eigen::MatrixXd& samples,
                      const Eigen::VectorXd& bandwidths) {
  if (samples.rows() < 1) throw Error("kde_fit_fixed: no samples");
  if (samples.cols() != bandwidths.size())
    throw Error("kde_fit_fixed: bandwidth dimension mismatch");
  if ((bandwidths.array() <= 0.0).any())
    throw Error("kde_fit_fixed: non-positive bandwidth");
  return KDEDist{samples, bandwidths};
}

double kde_logpdf(const KDEDist& d, const Eigen::VectorXd& x) {
  if (x.size() != d.samples.cols())
    throw Error("kde_logpdf: dimension mismatch");
  const auto n = d.samples.rows();
  const double base =
      -0.5 * kLogTwoPi * static_cast<double>(x.size()) -
      d.bandwidths.array().log().sum();
  std::vector<double> lp(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::ArrayXd z =
        (x.transpose() - d.samples.row(i)).transpose().array() /
        d.bandwidths.array();
    lp[static_cast<std::size_t>(i)] = base - 0.5 * z.square().sum();
  }
  return logsumexp(lp) - std::log(static_cast<double>(n));
}

Eigen::VectorXd kde_sample(const KDEDist& d, RandomStream& rng) {
  const int i = rng.uniform_int(static_cast<int>(d.samples.rows()));
  Eigen::VectorXd out = d.samples.row(i).transpose();
  for (Eigen::Index j = 0; j < out.size(); ++j)
    out[j] += d.bandwidths[j] * rng.normal();
  return out;
}

}  // namespace scenegen::prob
