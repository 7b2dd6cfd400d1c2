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

#include "gtest/gtest.h"
#include "scqkd/protocol.h"

using namespace scqkd;

namespace {

constexpr double PI = std::numbers::pi;

// Independent entropy oracle in natural logs.
double entropy_oracle(double p) {
    if (p <= 0 || p >= 1) {
        return 0;
    }
    return -(p * std::log(p) + (1 - p) * std::log1p(-p)) / std::log(2.0);
}

// Posterior P(error | D1) from the four equally likely settings and the
// per-setting D1 probabilities, written out by hand.
double error_oracle(double theta) {
    double ff = 0.5 * (1 - std::cos(theta));
    double fa = 0.25;
    double af = 0.25;
    double aa = 0;
    return (ff + aa) / (ff + fa + af + aa);
}

// Sign change of h(e(theta)) - cos(theta) located by a dense grid scan.
double threshold_oracle() {
    const int n = 2'000'000;
    double prev = entropy_oracle(error_oracle(0)) - 1;
    for (int k = 1; k <= n; k++) {
        double t = k * (PI / 2) / n;
        double f = entropy_oracle(error_oracle(t)) - std::cos(t);
        if (prev < 0 && f >= 0) {
            return t;
        }
        prev = f;
    }
    return NAN;
}

}  // namespace

TEST(analysis, binary_entropy_examples) {
    ASSERT_EQ(binary_entropy(0), 0);
    ASSERT_EQ(binary_entropy(1), 0);
    ASSERT_NEAR(binary_entropy(0.5), 1, 1e-15);
    double oracle = entropy_oracle(0.209);
    ASSERT_NEAR(binary_entropy(0.209), oracle, 1e-12);
    ASSERT_NEAR(binary_entropy(0.209), 0.7399, 5e-4);
    ASSERT_THROW(binary_entropy(-0.1), std::domain_error);
    ASSERT_THROW(binary_entropy(1.1), std::domain_error);
}

TEST(analysis, binary_entropy_symmetry_and_bounds) {
    for (int k = 1; k < 100; k++) {
        double e = k / 100.0;
        ASSERT_NEAR(binary_entropy(e), binary_entropy(1 - e), 1e-12);
        ASSERT_GT(binary_entropy(e), 0);
        ASSERT_LE(binary_entropy(e), 1 + 1e-15);
        ASSERT_NEAR(binary_entropy(e), entropy_oracle(e), 1e-12);
    }
}

TEST(analysis, visibility_from_counts_examples) {
    OutcomeCounts c;
    c.at(FF, Outcome::D2) = 750;
    c.at(FF, Outcome::D1) = 250;
    ASSERT_NEAR(*visibility_from_counts(c), 0.5, 1e-15);

    OutcomeCounts empty;
    ASSERT_FALSE(visibility_from_counts(empty).has_value());

    OutcomeCounts perfect;
    perfect.at(FF, Outcome::D2) = 10;
    perfect.at(FA, Outcome::D1) = 3;
    ASSERT_EQ(*visibility_from_counts(perfect), 1);
}

TEST(analysis, error_rate_from_counts_examples) {
    OutcomeCounts c;
    c.at(FF, Outcome::D1) = 50;
    c.at(FA, Outcome::D1) = 100;
    c.at(AF, Outcome::D1) = 100;
    c.at(AA, Outcome::D1) = 0;
    ASSERT_NEAR(*error_rate_from_counts(c), 0.2, 1e-15);

    OutcomeCounts none;
    none.at(FF, Outcome::D2) = 5;
    ASSERT_FALSE(error_rate_from_counts(none).has_value());
    ASSERT_FALSE(error_rate_from_d1_weights({0, 0, 0, 0}).has_value());
}

TEST(analysis, analytic_functions_match_oracles) {
    for (int k = 0; k <= 50; k++) {
        double t = k * (PI / 2) / 50;
        ASSERT_NEAR(analytic_error(t), error_oracle(t), 1e-14);
        ASSERT_NEAR(analytic_visibility(t), std::cos(t), 1e-15);
        ASSERT_NEAR(eve_information(t), 1 - std::cos(t), 1e-15);
    }
    ASSERT_NEAR(analytic_error(PI / 2), 0.5, 1e-15);
    ASSERT_NEAR(analytic_error(PI / 3), 1 / 3.0, 1e-15);
    ASSERT_EQ(analytic_error(0), 0);
    ASSERT_NEAR(key_rate(0, 0), 1, 1e-15);
    ASSERT_NEAR(key_rate(0.5, 1), -1, 1e-15);
}

TEST(analysis, security_threshold_location) {
    auto th = security_threshold();
    double oracle = threshold_oracle();
    ASSERT_NEAR(th.theta_star, oracle, 2e-6);
    ASSERT_NEAR(th.theta_star, 0.745, 0.005);
    ASSERT_NEAR(th.e_star, 0.209, 0.002);
    ASSERT_NEAR(th.e_star, analytic_error(th.theta_star), 1e-15);
    // K changes sign across the threshold.
    auto below = security_point(th.theta_star - 0.01);
    auto above = security_point(th.theta_star + 0.01);
    ASSERT_GT(below.key_rate, 0);
    ASSERT_LT(above.key_rate, 0);
    ASSERT_NEAR(security_point(th.theta_star).key_rate, 0, 1e-8);
}

TEST(analysis, honest_table_entries) {
    auto t = honest_outcome_table();
    const OutcomeTable expect{{{0, 1, 0}, {0.25, 0.25, 0.5}, {0.25, 0.25, 0.5}, {0, 0, 1}}};
    for (size_t s = 0; s < NUM_SETTINGS; s++) {
        for (size_t c = 0; c < NUM_DETECTION_CLASSES; c++) {
            ASSERT_EQ(t[s][c], expect[s][c]) << s << " " << c;
        }
    }
}

TEST(analysis, attacked_table_rows) {
    for (double theta : {0.0, 0.2, PI / 3, PI / 2}) {
        auto t = attacked_outcome_table(theta);
        auto h = honest_outcome_table();
        ASSERT_NEAR(t[0][0], (1 - std::cos(theta)) / 2, 1e-15);
        ASSERT_NEAR(t[0][1], (1 + std::cos(theta)) / 2, 1e-15);
        ASSERT_EQ(t[0][2], 0);
        for (size_t s = 1; s < NUM_SETTINGS; s++) {
            ASSERT_EQ(t[s], h[s]);
        }
    }
}

TEST(analysis, estimator_on_exact_weights_matches_bayes) {
    for (int k = 0; k <= 20; k++) {
        double theta = k * (PI / 2) / 20;
        auto t = attacked_outcome_table(theta);
        std::array<double, NUM_SETTINGS> w{};
        for (size_t s = 0; s < NUM_SETTINGS; s++) {
            w[s] = 0.25 * t[s][0];
        }
        if (k == 0) {
            ASSERT_EQ(*error_rate_from_d1_weights(w), 0);
            continue;
        }
        ASSERT_NEAR(*error_rate_from_d1_weights(w), analytic_error(theta), 1e-12);
    }
}

TEST(analysis, exact_pipeline_reproduces_closed_form_table) {
    for (double theta : {0.0, 0.2, 0.745, PI / 2}) {
        SessionConfig cfg;
        cfg.attack = NumberPreservingParams{theta};
        auto exact = exact_outcome_table(cfg);
        auto closed = attacked_outcome_table(theta);
        for (size_t s = 0; s < NUM_SETTINGS; s++) {
            for (size_t c = 0; c < NUM_DETECTION_CLASSES; c++) {
                ASSERT_NEAR(exact[s][c], closed[s][c], 1e-12) << theta << " " << s << " " << c;
            }
        }
    }
}

TEST(analysis, sweep_endpoints) {
    std::array<double, 1> zero{0.0};
    auto p0 = sweep(zero).points.at(0);
    ASSERT_EQ(p0.visibility, 1);
    ASSERT_EQ(p0.error_rate, 0);
    ASSERT_EQ(p0.eve_info, 0);
    ASSERT_EQ(p0.key_rate, 1);

    std::array<double, 1> quarter{PI / 2};
    auto p1 = sweep(quarter).points.at(0);
    ASSERT_NEAR(p1.visibility, 0, 1e-15);
    ASSERT_NEAR(p1.error_rate, 0.5, 1e-15);
    ASSERT_NEAR(p1.eve_info, 1, 1e-15);
    ASSERT_NEAR(p1.key_rate, -1, 1e-12);
}

TEST(analysis, sweep_is_monotone_and_complementary) {
    auto grid = linspace(0, 1.5, 100);
    ASSERT_EQ(grid.size(), 100u);
    ASSERT_EQ(grid.front(), 0);
    ASSERT_EQ(grid.back(), 1.5);
    auto curve = sweep(grid);
    double theta_star = security_threshold().theta_star;
    int crossings = 0;
    for (size_t k = 0; k < curve.points.size(); k++) {
        const auto &p = curve.points[k];
        ASSERT_NEAR(p.visibility + p.eve_info, 1, 1e-12);
        ASSERT_NEAR(p.bob_info, 1 - binary_entropy(p.error_rate), 1e-15);
        if (k > 0) {
            const auto &q = curve.points[k - 1];
            ASSERT_LT(p.key_rate, q.key_rate);
            ASSERT_LT(p.visibility, q.visibility);
            ASSERT_GT(p.error_rate, q.error_rate);
            if (q.key_rate > 0 && p.key_rate <= 0) {
                crossings++;
                ASSERT_LE(q.theta, theta_star);
                ASSERT_GE(p.theta, theta_star);
            }
        }
    }
    ASSERT_EQ(crossings, 1);
}

TEST(analysis, sweep_rejects_bad_grids) {
    std::array<double, 2> descending{0.5, 0.1};
    ASSERT_THROW(sweep(descending), std::invalid_argument);
    std::array<double, 1> outside{2.0};
    ASSERT_THROW(sweep(outside), std::invalid_argument);
    std::array<double, 1> negative{-0.1};
    ASSERT_THROW(sweep(negative), std::invalid_argument);
}

TEST(analysis, binomial_sigma_values) {
    ASSERT_NEAR(binomial_sigma(0.5, 100), 0.05, 1e-15);
    ASSERT_EQ(binomial_sigma(0, 100), 0);
}
