#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scenegen/geometry.hpp"
#include "scenegen/rng.hpp"

namespace scenegen::prob {

// Numerical guards shared by the fitting routines.
inline constexpr double kSigmaMin = 1e-3;      // degenerate log-normal fits
inline constexpr double kKappaMax = 500.0;     // von Mises concentration cap
inline constexpr double kBandwidthMin = 1e-3;  // KDE bandwidth floor, meters

// ---- categorical ----

struct Categorical {
  std::vector<std::string> outcomes;
  std::vector<double> probs;

  // Probability of a label; 0 when the label was never observed.
  double prob(const std::string& label) const;
  const std::string& sample(RandomStream& rng) const;
};

Categorical categorical_fit(const std::map<std::string, std::int64_t>& counts);

// ---- log-normal ----

struct LogNormalDist {
  double mu = 0.0;     // log-meters
  double sigma = 1.0;  // > 0
};

LogNormalDist lognormal_fit(std::span<const double> samples,
                            double sigma_min = kSigmaMin);
double lognormal_logpdf(const LogNormalDist& d, double x);
double lognormal_sample(const LogNormalDist& d, RandomStream& rng);

// ---- von Mises mixture ----

struct VonMisesComponent {
  double weight = 1.0;
  double mu = 0.0;     // [0, 2*pi)
  double kappa = 0.0;  // >= 0
};

struct VonMisesMixture {
  std::vector<VonMisesComponent> components;
};

// Modified Bessel function of the first kind, order zero.
double bessel_i0(double kappa);

// Concentration from a mean resultant length (Best-Fisher approximation),
// capped at kKappaMax.
double kappa_from_resultant(double rbar);

// Single component: closed-form circular-mean fit. k_components > 1: EM
// with deterministic initialization. Requires >= 5 angles per component.
VonMisesMixture vonmises_fit(std::span<const double> angles,
                             int k_components = 1, int em_iters = 200);
double vonmises_logpdf(const VonMisesMixture& d, double theta);
double vonmises_sample(const VonMisesMixture& d, RandomStream& rng);

// ---- Gaussian-kernel density estimate ----

struct KDEDist {
  Eigen::MatrixXd samples;     // n x d, one row per sample
  Eigen::VectorXd bandwidths;  // per dimension, > 0
};

// Silverman's per-dimension rule 1.06 * sd * n^(-1/5), floored.
KDEDist kde_fit(const Eigen::MatrixXd& samples,
                double bandwidth_floor = kBandwidthMin);
KDEDist kde_fit_fixed(const Eigen::MatrixXd& samples,
                      const Eigen::VectorXd& bandwidths);
double kde_logpdf(const KDEDist& d, const Eigen::VectorXd& x);
Eigen::VectorXd kde_sample(const KDEDist& d, RandomStream& rng);

}  // namespace scenegen::prob
