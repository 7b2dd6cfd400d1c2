// Copyright 2026 The scqkd Authors
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

#ifndef SCQKD_ANALYSIS_H
#define SCQKD_ANALYSIS_H

#include <optional>
#include <span>
#include <vector>

#include "scqkd/session_types.h"

namespace scqkd {

/// h(e) = -e log2 e - (1-e) log2 (1-e), with h(0) = h(1) = 0.
double binary_entropy(double e);

/// (N[D2|FF] - N[D1|FF]) / (N[D1|FF] + N[D2|FF]); nullopt without (F,F) detections.
std::optional<double> visibility_from_counts(const OutcomeCounts &counts);

/// (N[D1 & FF] + N[D1 & AA]) / N[D1]; nullopt without D1 events.
std::optional<double> error_rate_from_counts(const OutcomeCounts &counts);

/// The error-rate estimator evaluated on joint weights P(D1 and settings),
/// indexed FF, FA, AF, AA. Lets exact probabilities stand in for counts.
std::optional<double> error_rate_from_d1_weights(const std::array<double, NUM_SETTINGS> &d1_weights);

double analytic_visibility(double theta);
/// Bayesian error rate (1 - cos) / (2 - cos) under the number-preserving attack.
double analytic_error(double theta);
/// I_E = I_AE = I_BE = 1 - cos(theta).
double eve_information(double theta);
/// K = (1 - h(e)) - I_E.
double key_rate(double e, double eve_info);

struct SecurityThreshold {
    double theta_star;
    double e_star;
};

constexpr double THRESHOLD_TOLERANCE = 1e-9;

/// Root of h(analytic_error(theta)) - cos(theta) on [0, pi/2], by bisection.
SecurityThreshold security_threshold();

/// P(detection class | settings) for the honest protocol at T = R = 1/2.
OutcomeTable honest_outcome_table();
/// Honest table with the (F,F) row replaced by ((1-cos)/2, (1+cos)/2, 0).
OutcomeTable attacked_outcome_table(double theta);

struct SecurityPoint {
    double theta;
    double visibility;
    double error_rate;
    double eve_info;
    double bob_info;
    double key_rate;
};

struct SecurityCurve {
    std::vector<SecurityPoint> points;
};

SecurityPoint security_point(double theta);

/// Evaluates a point per grid value. Throws std::invalid_argument unless the
/// grid is strictly increasing inside [0, pi/2].
SecurityCurve sweep(std::span<const double> theta_grid);

/// `steps` evenly spaced values from start to end inclusive.
std::vector<double> linspace(double start, double end, size_t steps);

/// sqrt(p (1 - p) / n).
double binomial_sigma(double p, double n);

}  // namespace scqkd

#endif
