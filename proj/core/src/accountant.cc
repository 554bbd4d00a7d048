// Copyright 2026 The fltop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fltop/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fltop/error.h"

namespace fltop::privacy {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
// Half-width, in standard deviations, kept around every mixture component.
// Beyond it each Gaussian component carries < exp(-72) relative mass.
constexpr double kTailSigmas = 12.0;
constexpr double kPanelSigmas = 1.0;
// Absolute error budget per unit length once the integrand is scaled to a
// peak of one.
constexpr double kAbsTolerancePerLength = 1e-14;
// Gauss and Kronrod estimates cannot agree below accumulated rounding.
constexpr double kRoundoffUlps = 1024.0;
constexpr double kAcceptRelError = 1e-10;
constexpr int kMaxDepth = 16;

double LogAddExp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

class MomentIntegrand {
 public:
  MomentIntegrand(int lambda, double sigma, double q)
      : lambda_(lambda),
        sigma_(sigma),
        log_q_(std::log(q)),
        log_1mq_(q < 1.0 ? std::log1p(-q) : -std::numeric_limits<double>::infinity()) {}

  double LogEta0(double x) const {
    return -kLogSqrt2Pi - std::log(sigma_) - x * x / (2 * sigma_ * sigma_);
  }
  double LogEta1(double x) const {
    const double shifted = -kLogSqrt2Pi - std::log(sigma_) -
                           (x - 1) * (x - 1) / (2 * sigma_ * sigma_);
    return LogAddExp(log_1mq_ + LogEta0(x), log_q_ + shifted);
  }

  // log of eta0 * (eta0/eta1)^lambda.
  double LogE1(double x) const {
    const double l0 = LogEta0(x);
    return l0 + lambda_ * (l0 - LogEta1(x));
  }
  // log of eta1 * (eta1/eta0)^lambda.
  double LogE2(double x) const {
    const double l1 = LogEta1(x);
    return l1 + lambda_ * (l1 - LogEta0(x));
  }

 private:
  int lambda_;
  double sigma_;
  double log_q_;
  double log_1mq_;
};

struct PanelResult {
  double value = 0.0;
  double error = 0.0;
};

template <typename F>
PanelResult Kronrod(const F& f, double a, double b) {
  PanelResult r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 0, 0.0, &r.error);
  return r;
}

// Gauss-Kronrod on [a, b], bisected until the error estimate fits the budget
// or stops shrinking, which means it is dominated by evaluation noise.
template <typename F>
PanelResult IntegratePanel(const F& f, double a, double b, const PanelResult& whole,
                           int depth) {
  const double budget = kAbsTolerancePerLength * (b - a) +
                        kRoundoffUlps * std::numeric_limits<double>::epsilon() *
                            std::abs(whole.value);
  if (whole.error <= budget || depth >= kMaxDepth) return whole;
  const double mid = 0.5 * (a + b);
  const PanelResult left = Kronrod(f, a, mid);
  const PanelResult right = Kronrod(f, mid, b);
  if (left.error + right.error >= whole.error) return whole;
  const PanelResult l = IntegratePanel(f, a, mid, left, depth + 1);
  const PanelResult r = IntegratePanel(f, mid, b, right, depth + 1);
  return {l.value + r.value, l.error + r.error};
}

struct Interval {
  double lo;
  double hi;
};

// Union of [c - half_width, c + half_width] over the sorted centres.
std::vector<Interval> Windows(const std::vector<double>& centres, double half_width) {
  std::vector<Interval> out;
  for (double c : centres) {
    if (!out.empty() && c - half_width <= out.back().hi) {
      out.back().hi = c + half_width;
    } else {
      out.push_back({c - half_width, c + half_width});
    }
  }
  return out;
}

// log of the integral of exp(log_f) over the union of `windows`. The
// integrand is rescaled by its maximum on a grid so that large moments stay
// representable. Convergence is judged on the returned logarithm.
template <typename LogF>
double LogIntegrate(LogF log_f, const std::vector<Interval>& windows, double sigma,
                    const char* which, int lambda, double q) {
  const double grid_step = sigma / 8.0;
  double peak = -std::numeric_limits<double>::infinity();
  for (const Interval& w : windows) {
    const int steps = static_cast<int>(std::ceil((w.hi - w.lo) / grid_step));
    for (int i = 0; i <= steps; ++i) {
      peak = std::max(peak, log_f(std::min(w.hi, w.lo + i * grid_step)));
    }
  }
  auto f = [&](double x) { return std::exp(log_f(x) - peak); };

  // Panels are integrated in units of sigma, which keeps the quadrature
  // error estimates meaningful when sigma is tiny.
  double total = 0.0;
  double total_error = 0.0;
  for (const Interval& w : windows) {
    auto g = [&](double u) { return f(w.lo + sigma * u); };
    const double span = (w.hi - w.lo) / sigma;
    const int panels =
        std::max(1, static_cast<int>(std::ceil(span / kPanelSigmas)));
    const double width = span / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = p * width;
      const double b = (p + 1 == panels) ? span : a + width;
      const PanelResult r = IntegratePanel(g, a, b, Kronrod(g, a, b), 0);
      total += r.value;
      total_error += r.error;
    }
  }
  const double result = peak + std::log(sigma) + std::log(total);
  const double log_error = std::log1p(total_error / total);
  if (!(total > 0.0) || !std::isfinite(result) ||
      !(log_error <= kAcceptRelError * std::max(1.0, std::abs(result)))) {
    std::ostringstream msg;
    msg << "quadrature for " << which << " did not converge (lambda=" << lambda
        << ", sigma=" << sigma << ", C=" << q << ", estimate=" << total * sigma
        << ", error=" << total_error * sigma << ", scale=exp(" << peak << "))";
    throw Error(ErrorCode::kNumeric, msg.str());
  }
  return result;
}

void CheckArgs(int lambda, double sigma, double sampling) {
  Require(lambda >= 1, ErrorCode::kConfiguration, "lambda must be >= 1");
  Require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::kConfiguration,
          "sigma must be positive and finite");
  Require(sampling >= 0.0 && sampling <= 1.0, ErrorCode::kConfiguration,
          "sampling probability must lie in [0, 1]");
}

}  // namespace

LogMomentParts LogMomentIntegrals(int lambda, double sigma, double sampling) {
  CheckArgs(lambda, sigma, sampling);
  if (sampling == 0.0) return {};
  if (sigma < kMinQuadratureSigma) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  const MomentIntegrand integrand(lambda, sigma, sampling);
  // Expanding eta1^(lambda+1) binomially gives Gaussians of width sigma
  // centred at 0..lambda+1, so windows around those centres carry the mass
  // of E2. The E1 integrand is bounded by eta0 / (1 - q)^lambda.
  const double half_width = kTailSigmas * sigma;
  std::vector<double> centres(static_cast<std::size_t>(lambda) + 2);
  for (std::size_t k = 0; k < centres.size(); ++k) centres[k] = static_cast<double>(k);
  LogMomentParts parts;
  parts.log_e1 = LogIntegrate([&](double x) { return integrand.LogE1(x); },
                              Windows({0.0}, half_width), sigma, "E1", lambda,
                              sampling);
  parts.log_e2 = LogIntegrate([&](double x) { return integrand.LogE2(x); },
                              Windows(centres, half_width), sigma, "E2", lambda,
                              sampling);
  return parts;
}

double LogMoment(int lambda, double sigma, double sampling) {
  const LogMomentParts parts = LogMomentIntegrals(lambda, sigma, sampling);
  // Both integrals are >= 1 analytically.
  return std::max(0.0, std::max(parts.log_e1, parts.log_e2));
}

MomentsAccountant::MomentsAccountant(double sigma, double sampling,
                                     int lambda_max)
    : sigma_(sigma), sampling_(sampling) {
  Require(lambda_max >= 1, ErrorCode::kConfiguration, "lambda_max must be >= 1");
  log_moments_.reserve(static_cast<std::size_t>(lambda_max));
  for (int l = 1; l <= lambda_max; ++l) {
    log_moments_.push_back(LogMoment(l, sigma, sampling));
  }
}

EpsilonResult MomentsAccountant::Epsilon(int rounds, double delta) const {
  Require(rounds >= 1, ErrorCode::kConfiguration, "rounds must be >= 1");
  Require(delta > 0.0 && delta < 1.0, ErrorCode::kConfiguration,
          "delta must lie in (0, 1)");
  EpsilonResult best{std::numeric_limits<double>::infinity(), 0};
  const double log_delta = std::log(delta);
  for (std::size_t i = 0; i < log_moments_.size(); ++i) {
    const double lambda = static_cast<double>(i + 1);
    const double eps = (rounds * log_moments_[i] - log_delta) / lambda;
    if (eps < best.epsilon) best = {eps, static_cast<int>(i + 1)};
  }
  return best;
}

EpsilonResult Epsilon(const AccountantQuery& query) {
  Require(query.sampling > 0.0 && query.sampling <= 1.0,
          ErrorCode::kConfiguration, "sampling probability must lie in (0, 1]");
  return MomentsAccountant(query.sigma, query.sampling, query.lambda_max)
      .Epsilon(query.rounds, query.delta);
}

}  // namespace fltop::privacy
