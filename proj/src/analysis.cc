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

#include "scqkd/analysis.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scqkd {

double binary_entropy(double e) {
    if (!(e >= 0 && e <= 1)) {
        throw std::domain_error("binary_entropy: argument must lie in [0, 1], got " + std::to_string(e));
    }
    if (e == 0 || e == 1) {
        return 0;
    }
    return -e * std::log2(e) - (1 - e) * std::log2(1 - e);
}

std::optional<double> visibility_from_counts(const OutcomeCounts &counts) {
    double d1 = static_cast<double>(counts.at(FF, Outcome::D1));
    double d2 = static_cast<double>(counts.at(FF, Outcome::D2));
    if (d1 + d2 == 0) {
        return std::nullopt;
    }
    return (d2 - d1) / (d1 + d2);
}

std::optional<double> error_rate_from_d1_weights(const std::array<double, NUM_SETTINGS> &w) {
    double total = w[FF.index()] + w[FA.index()] + w[AF.index()] + w[AA.index()];
    if (total <= 0) {
        return std::nullopt;
    }
    return (w[FF.index()] + w[AA.index()]) / total;
}

std::optional<double> error_rate_from_counts(const OutcomeCounts &counts) {
    std::array<double, NUM_SETTINGS> w{};
    for (size_t s = 0; s < NUM_SETTINGS; s++) {
        w[s] = static_cast<double>(counts.at(SettingsPair::from_index(s), Outcome::D1));
    }
    return error_rate_from_d1_weights(w);
}

double analytic_visibility(double theta) {
    return std::cos(theta);
}

double analytic_error(double theta) {
    double c = std::cos(theta);
    return (1 - c) / (2 - c);
}

double eve_information(double theta) {
    return 1 - std::cos(theta);
}

double key_rate(double e, double eve_info) {
    return (1 - binary_entropy(e)) - eve_info;
}

SecurityThreshold security_threshold() {
    auto gap = [](double theta) {
        return binary_entropy(analytic_error(theta)) - std::cos(theta);
    };
    double lo = 0;
    double hi = std::numbers::pi / 2;
    if (!(gap(lo) < 0 && gap(hi) > 0)) {
        throw std::logic_error("security_threshold: root is not bracketed.");
    }
    while (hi - lo > THRESHOLD_TOLERANCE) {
        double mid = 0.5 * (lo + hi);
        (gap(mid) < 0 ? lo : hi) = mid;
    }
    double theta = 0.5 * (lo + hi);
    return {theta, analytic_error(theta)};
}

OutcomeTable honest_outcome_table() {
    OutcomeTable t{};
    auto set = [&](SettingsPair s, double d1, double d2, double null) {
        t[s.index()] = {d1, d2, null};
    };
    set(FF, 0, 1, 0);
    set(FA, 0.25, 0.25, 0.5);
    set(AF, 0.25, 0.25, 0.5);
    set(AA, 0, 0, 1);
    return t;
}

OutcomeTable attacked_outcome_table(double theta) {
    OutcomeTable t = honest_outcome_table();
    double c = std::cos(theta);
    t[FF.index()] = {(1 - c) / 2, (1 + c) / 2, 0};
    return t;
}

SecurityPoint security_point(double theta) {
    SecurityPoint p;
    p.theta = theta;
    p.visibility = analytic_visibility(theta);
    p.error_rate = analytic_error(theta);
    p.eve_info = eve_information(theta);
    p.bob_info = 1 - binary_entropy(p.error_rate);
    p.key_rate = p.bob_info - p.eve_info;
    return p;
}

SecurityCurve sweep(std::span<const double> theta_grid) {
    SecurityCurve curve;
    for (size_t k = 0; k < theta_grid.size(); k++) {
        double theta = theta_grid[k];
        if (!(theta >= 0 && theta <= std::numbers::pi / 2 + 1e-12)) {
            throw std::invalid_argument("sweep: theta must lie in [0, pi/2].");
        }
        if (k > 0 && !(theta > theta_grid[k - 1])) {
            throw std::invalid_argument("sweep: theta grid must be strictly increasing.");
        }
        curve.points.push_back(security_point(theta));
        if (k > 0 && !(curve.points[k].key_rate < curve.points[k - 1].key_rate)) {
            throw std::logic_error("sweep: key rate is not strictly decreasing.");
        }
    }
    return curve;
}

std::vector<double> linspace(double start, double end, size_t steps) {
    std::vector<double> out;
    if (steps == 0) {
        return out;
    }
    if (steps == 1) {
        return {start};
    }
    out.reserve(steps);
    for (size_t k = 0; k < steps; k++) {
        out.push_back(start + (end - start) * static_cast<double>(k) / static_cast<double>(steps - 1));
    }
    return out;
}

double binomial_sigma(double p, double n) {
    return std::sqrt(p * (1 - p) / n);
}

}  // namespace scqkd
