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

#ifndef FLTOP_METRICS_H_
#define FLTOP_METRICS_H_

#include <span>

namespace fltop::metrics {

// Fraction of predicted labels equal to the true labels.
double Accuracy(std::span<const int> predicted, std::span<const int> labels);

// Mean per-class recall over the classes present in `labels`. For a binary
// task this is (TPR + TNR) / 2.
double BalancedAccuracy(std::span<const int> predicted,
                        std::span<const int> labels);

// Area under the ROC curve for binary labels, computed as the probability
// that a random positive outranks a random negative (ties count one half).
// Throws a data error unless both classes are present.
double Auroc(std::span<const double> scores, std::span<const int> labels);

}  // namespace fltop::metrics

#endif  // FLTOP_METRICS_H_
