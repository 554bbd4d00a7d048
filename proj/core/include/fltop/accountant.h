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

#ifndef FLTOP_ACCOUNTANT_H_
#define FLTOP_ACCOUNTANT_H_

// Moments accountant for the sampled Gaussian mechanism at unit sensitivity.
//
// With eta0 = pdf N(0, sigma) and eta1 = (1 - q) * pdf N(0, sigma) +
// q * pdf N(1, sigma), the per-round log moment of order lambda is
//
//   alpha(lambda) = log max(E1, E2),
//   E1 = int eta0 * (eta0 / eta1)^lambda dx,
//   E2 = int eta1 * (eta1 / eta0)^lambda dx,
//
// and after T rounds epsilon = min_lambda (T * alpha(lambda) - log delta) /
// lambda over integer lambda in [1, lambda_max].

#include <vector>

namespace fltop::privacy {

inline constexpr int kDefaultLambdaMax = 64;
inline constexpr double kDefaultDelta = 1e-5;

struct AccountantQuery {
  double sigma = 1.0;     // noise multiplier
  double sampling = 0.0;  // per-round client sampling probability C
  int rounds = 1;
  double delta = kDefaultDelta;
  int lambda_max = kDefaultLambdaMax;
};

struct EpsilonResult {
  double epsilon = 0.0;
  int lambda = 0;  // minimizing moment order
};

// Below this noise multiplier the integrands exceed double precision; the
// moments are reported as +infinity, a valid but vacuous bound.
inline constexpr double kMinQuadratureSigma = 1e-4;

// Throws a configuration error for lambda < 1, sigma <= 0 or sampling outside
// [0, 1]; a numeric error if the quadrature fails to converge.
double LogMoment(int lambda, double sigma, double sampling);

// log E1 and log E2 separately.
struct LogMomentParts {
  double log_e1 = 0.0;
  double log_e2 = 0.0;
};
LogMomentParts LogMomentIntegrals(int lambda, double sigma, double sampling);

EpsilonResult Epsilon(const AccountantQuery& query);

// Caches alpha(1..lambda_max) for a fixed (sigma, sampling) so that epsilon
// can be read off for any number of rounds.
class MomentsAccountant {
 public:
  MomentsAccountant(double sigma, double sampling,
                    int lambda_max = kDefaultLambdaMax);

  EpsilonResult Epsilon(int rounds, double delta) const;

  double sigma() const { return sigma_; }
  double sampling() const { return sampling_; }
  // log_moments()[l - 1] = alpha(l).
  const std::vector<double>& log_moments() const { return log_moments_; }

 private:
  double sigma_;
  double sampling_;
  std::vector<double> log_moments_;
};

}  // namespace fltop::privacy

#endif  // FLTOP_ACCOUNTANT_H_
