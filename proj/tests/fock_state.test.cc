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

#include "scqkd/fock_state.h"

#include <cmath>

#include "gtest/gtest.h"
#include "scqkd/rng.h"

using namespace scqkd;

namespace {

BasisKet ket_with(Arm arm, PolMode pol, uint8_t n = 1) {
    BasisKet k;
    k.at(arm, pol) = n;
    return k;
}

SystemState random_state(Rng &rng, size_t probe_dim, int max_total) {
    SystemState s(probe_dim);
    for (int trial = 0; trial < 12; trial++) {
        BasisKet k;
        int budget = static_cast<int>(rng.below(static_cast<uint64_t>(max_total) + 1));
        for (int p = 0; p < budget; p++) {
            k.occ[rng.below(NUM_MODES)]++;
        }
        k.probe = static_cast<uint32_t>(rng.below(probe_dim));
        s.add(k, Complex(rng.uniform() - 0.5, rng.uniform() - 0.5));
    }
    return s.normalized();
}

// Probability that no photon remains in `arm`, by direct summation.
double vacuum_weight(const SystemState &s, Arm arm) {
    double w = 0;
    for (const auto &[k, a] : s.amplitudes()) {
        if (k.arm_photons(arm) == 0) {
            w += std::norm(a);
        }
    }
    return w;
}

}  // namespace

TEST(fock_state, initial_state_balanced_horizontal) {
    auto s = initial_state({0.5, 0.5}, Polarization::horizontal());
    ASSERT_NEAR(std::abs(s.amplitude(ket_with(Arm::B, PolMode::H)) - Complex(std::sqrt(0.5), 0)), 0, 1e-15);
    ASSERT_NEAR(std::abs(s.amplitude(ket_with(Arm::A, PolMode::H)) - Complex(0, std::sqrt(0.5))), 0, 1e-15);
    ASSERT_EQ(s.amplitudes().size(), 2u);
    ASSERT_NEAR(s.norm2(), 1, 1e-12);
}

TEST(fock_state, initial_state_full_transmission) {
    auto s = initial_state({1, 0}, Polarization::horizontal());
    ASSERT_EQ(s.amplitudes().size(), 1u);
    ASSERT_NEAR(std::abs(s.amplitude(ket_with(Arm::B, PolMode::H)) - Complex(1, 0)), 0, 1e-15);
}

TEST(fock_state, initial_state_036) {
    auto s = initial_state({0.36, 0.64}, Polarization::horizontal());
    ASSERT_NEAR(std::abs(s.amplitude(ket_with(Arm::B, PolMode::H)) - Complex(0.6, 0)), 0, 1e-15);
    ASSERT_NEAR(std::abs(s.amplitude(ket_with(Arm::A, PolMode::H)) - Complex(0, 0.8)), 0, 1e-15);
}

TEST(fock_state, initial_state_rejects_bad_beamsplitter) {
    ASSERT_THROW(initial_state({0.5, 0.6}, Polarization::horizontal()), std::invalid_argument);
    ASSERT_THROW(initial_state({1.2, -0.2}, Polarization::horizontal()), std::invalid_argument);
    ASSERT_THROW(initial_state({0.5, 0.5}, {Complex(1, 0), Complex(1, 0)}), std::invalid_argument);
    ASSERT_THROW(SystemState(0), std::invalid_argument);
}

TEST(fock_state, initial_state_polarization_is_shared_by_both_arms) {
    auto s = initial_state({0.5, 0.5}, Polarization::diagonal());
    ASSERT_EQ(s.amplitudes().size(), 4u);
    ASSERT_NEAR(std::abs(s.amplitude(ket_with(Arm::B, PolMode::V))), 0.5, 1e-15);
    ASSERT_NEAR(s.norm2(), 1, 1e-12);
}

TEST(fock_state, absorber_probabilities) {
    auto half = apply_absorber(initial_state({0.5, 0.5}, Polarization::horizontal()), Arm::B);
    ASSERT_NEAR(half.absorbed.probability, 0.5, 1e-12);
    ASSERT_NEAR(half.passed.probability, 0.5, 1e-12);
    ASSERT_NEAR(half.passed.collapsed.norm2(), 1, 1e-12);

    auto vac = apply_absorber(SystemState::vacuum(), Arm::A);
    ASSERT_EQ(vac.absorbed.probability, 0);
    ASSERT_TRUE(vac.absorbed.collapsed.empty());
    ASSERT_NEAR(vac.passed.probability, 1, 1e-15);

    auto t36 = apply_absorber(initial_state({0.36, 0.64}, Polarization::horizontal()), Arm::B);
    ASSERT_NEAR(t36.absorbed.probability, 0.36, 1e-12);
}

TEST(fock_state, mirror_is_identity) {
    auto s = initial_state({0.5, 0.5}, Polarization::diagonal());
    auto m = apply_mirror(apply_mirror(s, Arm::A), Arm::B);
    ASSERT_NEAR(std::abs(overlap(s, m) - Complex(1, 0)), 0, 1e-15);
    Rng rng(3);
    for (int k = 0; k < 20; k++) {
        auto r = random_state(rng, 4, 2);
        ASSERT_NEAR(apply_mirror(r, Arm::B).norm2(), 1, 1e-12);
    }
}

TEST(fock_state, recombine_balanced_both_reflect) {
    auto rec = recombine(initial_state({0.5, 0.5}, Polarization::horizontal()), {0.5, 0.5});
    ASSERT_NEAR(rec.probability(DetectorClass::D2), 1, 1e-12);
    ASSERT_NEAR(rec.probability(DetectorClass::D1), 0, 1e-12);
}

TEST(fock_state, recombine_general_transmittance) {
    for (double t : {0.1, 0.25, 0.36, 0.5, 0.7, 0.95}) {
        BeamsplitterParams bs{t, 1 - t};
        auto rec = recombine(initial_state(bs, Polarization::antidiagonal()), bs);
        ASSERT_NEAR(rec.probability(DetectorClass::D1), (t - (1 - t)) * (t - (1 - t)), 1e-12) << t;
        ASSERT_NEAR(rec.probability(DetectorClass::D2), 4 * t * (1 - t), 1e-12) << t;
    }
    auto rec = recombine(initial_state({0.36, 0.64}, Polarization::horizontal()), {0.36, 0.64});
    ASSERT_NEAR(rec.probability(DetectorClass::D1), 0.0784, 1e-12);
    ASSERT_NEAR(rec.probability(DetectorClass::D2), 0.9216, 1e-12);
}

TEST(fock_state, balanced_recombination_phases) {
    // At T = R = 1/2 each input couples to both detectors with weight 1/2 and the
    // relative a/b phase differs by pi between D1 and D2.
    auto m = recombination_matrix({0.5, 0.5});
    size_t a = mode_index(Arm::A, PolMode::H);
    size_t b = mode_index(Arm::B, PolMode::H);
    size_t d1 = a;
    size_t d2 = b;
    for (size_t in : {a, b}) {
        for (size_t out : {d1, d2}) {
            ASSERT_NEAR(std::norm(m[in][out]), 0.5, 1e-15);
        }
    }
    Complex r1 = m[b][d1] / m[a][d1];
    Complex r2 = m[b][d2] / m[a][d2];
    ASSERT_NEAR(std::abs(r1 + r2), 0, 1e-15);
}

TEST(fock_state, blocking_statistics_general_transmittance) {
    for (double t : {0.25, 0.36, 0.5, 0.7}) {
        double r = 1 - t;
        BeamsplitterParams bs{t, r};
        auto s = initial_state(bs, Polarization::horizontal());

        auto alice_blocks = apply_absorber(s, Arm::A);
        ASSERT_NEAR(alice_blocks.absorbed.probability, r, 1e-12);
        auto rec_a = recombine(alice_blocks.passed.collapsed, bs);
        ASSERT_NEAR(alice_blocks.passed.probability * rec_a.probability(DetectorClass::D1), t * t, 1e-12);
        ASSERT_NEAR(alice_blocks.passed.probability * rec_a.probability(DetectorClass::D2), r * t, 1e-12);

        auto bob_blocks = apply_absorber(s, Arm::B);
        ASSERT_NEAR(bob_blocks.absorbed.probability, t, 1e-12);
        auto rec_b = recombine(bob_blocks.passed.collapsed, bs);
        ASSERT_NEAR(bob_blocks.passed.probability * rec_b.probability(DetectorClass::D1), r * r, 1e-12);
        ASSERT_NEAR(bob_blocks.passed.probability * rec_b.probability(DetectorClass::D2), r * t, 1e-12);
    }
}

TEST(fock_state, recombine_preserves_probability) {
    Rng rng(11);
    for (int k = 0; k < 200; k++) {
        auto s = random_state(rng, 3, 2);
        double t = rng.uniform();
        auto rec = recombine(s, {t, 1 - t});
        double total = 0;
        for (const auto &b : rec.branches) {
            total += b.probability;
        }
        ASSERT_NEAR(total, 1, 1e-10);
        ASSERT_NEAR(apply_mode_transform(s, recombination_matrix({t, 1 - t})).norm2(), 1, 1e-10);
    }
}

TEST(fock_state, two_photons_flag_multicount) {
    SystemState s(1);
    BasisKet k;
    k.at(Arm::A, PolMode::H) = 1;
    k.at(Arm::B, PolMode::H) = 1;
    s.add(k, 1);
    auto rec = recombine(s, {0.5, 0.5});
    // Hong-Ou-Mandel: both photons leave the same port, never one in each.
    ASSERT_NEAR(rec.probability(DetectorClass::MultiCount), 1, 1e-12);
    for (const auto &b : rec.branches) {
        ASSERT_TRUE(b.d1_photons == 2 || b.d2_photons == 2);
    }
}

TEST(fock_state, overlap_properties) {
    auto s = initial_state({0.3, 0.7}, Polarization::diagonal());
    ASSERT_NEAR(std::abs(overlap(s, s) - Complex(1, 0)), 0, 1e-12);

    SystemState a(2);
    a.add(ket_with(Arm::A, PolMode::H), 1);
    SystemState b(2);
    b.add(ket_with(Arm::B, PolMode::H), 1);
    ASSERT_EQ(overlap(a, b), Complex(0, 0));

    SystemState c(3);
    ASSERT_THROW(overlap(a, c), std::invalid_argument);

    Rng rng(2);
    for (int k = 0; k < 50; k++) {
        ASSERT_LE(std::abs(overlap(random_state(rng, 2, 2), random_state(rng, 2, 2))), 1 + 1e-10);
    }
}

TEST(fock_state, truncation_enforced) {
    SystemState s;
    BasisKet k;
    k.at(Arm::A, PolMode::H) = 2;
    k.at(Arm::B, PolMode::V) = 1;
    ASSERT_THROW(s.add(k, 1), std::domain_error);
    BasisKet p;
    p.probe = 9;
    ASSERT_THROW(s.add(p, 1), std::out_of_range);
}

TEST(fock_state, backward_leg_exposed_arm_states_are_orthogonal) {
    // Secret bit 0 (Alice absorbs): the photon is in the exposed arm on the way back.
    // Secret bit 1 (Bob absorbs, no click): the exposed arm carries vacuum.
    auto s = initial_state({0.5, 0.5}, Polarization::diagonal());
    auto bit0 = apply_absorber(s, Arm::A).passed.collapsed;
    auto bit1 = apply_absorber(s, Arm::B).passed.collapsed;

    // Reduced occupation distributions of arm B.
    std::map<std::pair<int, int>, double> rho0, rho1;
    for (const auto &[k, a] : bit0.amplitudes()) {
        rho0[{k.at(Arm::B, PolMode::H), k.at(Arm::B, PolMode::V)}] += std::norm(a);
    }
    for (const auto &[k, a] : bit1.amplitudes()) {
        rho1[{k.at(Arm::B, PolMode::H), k.at(Arm::B, PolMode::V)}] += std::norm(a);
    }
    ASSERT_NEAR(vacuum_weight(bit1, Arm::B), 1, 1e-12);
    ASSERT_NEAR(vacuum_weight(bit0, Arm::B), 0, 1e-12);
    ASSERT_NEAR((rho0[{1, 0}]), 0.5, 1e-12);
    ASSERT_NEAR((rho0[{0, 1}]), 0.5, 1e-12);
    double fidelity_overlap = 0;
    for (const auto &[occ, p] : rho0) {
        fidelity_overlap += std::sqrt(p * rho1[occ]);
    }
    ASSERT_EQ(fidelity_overlap, 0);
}

TEST(fock_state, arm_detection_and_loss) {
    auto s = initial_state({0.5, 0.5}, Polarization::diagonal());
    auto det = detect_arm(s, Arm::B);
    double total = 0;
    for (const auto &d : det) {
        total += d.probability;
        for (const auto &[k, a] : d.collapsed.amplitudes()) {
            ASSERT_EQ(k.arm_photons(Arm::B), 0);
        }
    }
    ASSERT_NEAR(total, 1, 1e-12);
    ASSERT_EQ(det.size(), 3u);

    auto lossy = apply_arm_loss(s, Arm::B, 0.2);
    double lost = 0;
    total = 0;
    for (const auto &b : lossy) {
        total += b.probability;
        if (b.photons_h + b.photons_v > 0) {
            lost += b.probability;
        }
    }
    ASSERT_NEAR(total, 1, 1e-12);
    ASSERT_NEAR(lost, 0.5 * 0.2, 1e-12);
    ASSERT_THROW(apply_arm_loss(s, Arm::B, 1.0), std::invalid_argument);
}

TEST(fock_state, arm_block_indexing) {
    ASSERT_EQ(arm_block_dim(1, 4), 12u);
    ASSERT_EQ(arm_block_dim(2, 4), 24u);
    ASSERT_EQ(arm_block_index(0, 0, 0, 4), 0u);
    ASSERT_EQ(arm_block_index(1, 0, 1, 4), 5u);
    ASSERT_EQ(arm_block_index(0, 1, 0, 4), 8u);
    ASSERT_EQ(arm_block_index(0, 2, 3, 4), 23u);
}

TEST(fock_state, reduced_probe_density_traces_out_modes) {
    SystemState s(2);
    s.add(ket_with(Arm::A, PolMode::H), M_SQRT1_2);
    BasisKet k = ket_with(Arm::B, PolMode::H);
    k.probe = 1;
    s.add(k, M_SQRT1_2);
    auto rho = reduced_probe_density(s);
    ASSERT_NEAR(rho(0, 0).real(), 0.5, 1e-15);
    ASSERT_NEAR(rho(1, 1).real(), 0.5, 1e-15);
    ASSERT_NEAR(std::abs(rho(0, 1)), 0, 1e-15);
}
