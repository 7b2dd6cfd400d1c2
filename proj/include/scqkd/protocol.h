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

#ifndef SCQKD_PROTOCOL_H
#define SCQKD_PROTOCOL_H

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "scqkd/adversary.h"
#include "scqkd/analysis.h"
#include "scqkd/fock_state.h"
#include "scqkd/rng.h"
#include "scqkd/session_types.h"

namespace scqkd {

/// The four BB84 polarization states Alice may send.
enum class Bb84 : uint8_t { H = 0, V, D, A };
enum class Basis : uint8_t { Rectilinear = 0, Diagonal };

Polarization bb84_polarization(Bb84 state);
Basis basis_of(Bb84 state);
std::string_view bb84_name(Bb84 state);
std::string_view basis_name(Basis basis);

enum class TrojanDefense : uint8_t { None, Timing, Polarization, Both };

constexpr bool timing_defense(TrojanDefense d) {
    return d == TrojanDefense::Timing || d == TrojanDefense::Both;
}
constexpr bool polarization_defense(TrojanDefense d) {
    return d == TrojanDefense::Polarization || d == TrojanDefense::Both;
}

struct BobPolarization {
    Basis basis;
    Bb84 result;
    bool operator==(const BobPolarization &) const = default;
};

struct RoundRecord {
    uint64_t index = 0;
    SettingsPair settings;
    Bb84 sent_pol = Bb84::H;
    int64_t send_tick = 0;
    /// Present only when Bob's absorber detected a photon.
    std::optional<int64_t> bob_receive_tick;
    int64_t transit = 0;
    Outcome outcome = Outcome::Null;
    std::optional<BobPolarization> bob_pol;
    /// 0 when Alice applied A, 1 when Bob did; only on D1 rounds with one A.
    std::optional<uint8_t> sifted_bit;
    /// Eve's POVM result; only on D1 rounds under the number-preserving attack.
    std::optional<PovmOutcome> eve_outcome;
    /// Eve replaced the arm-b light with her own probe photon this round.
    bool trojan_probe = false;

    bool operator==(const RoundRecord &) const = default;
};

/// Integer-tick schedule: round k is sent at k * period (+ jitter under the timing defense).
struct TimingConfig {
    int64_t period = 16;
    int64_t transit = 5;
    int64_t jitter_window = 8;
};

struct SessionConfig {
    uint64_t rounds = 1;
    double test_fraction = 0.25;
    BeamsplitterParams bs;
    AttackModel attack = NoAttack{};
    /// Per-leg photon loss probability on arm b.
    double loss = 0;
    uint64_t seed = 0;
    TrojanDefense trojan = TrojanDefense::None;
    /// Fraction of rounds in which Eve substitutes an H probe photon on arm b.
    double trojan_probe = 0;
    TimingConfig timing;
    size_t probe_dim = DEFAULT_PROBE_DIM;
    size_t workers = 1;

    /// Throws std::invalid_argument on any out-of-range field.
    void validate() const;
};

/// Eve's guesses over sifted D1 rounds.
struct EveStats {
    uint64_t measured = 0;
    uint64_t conclusive = 0;
    uint64_t correct = 0;

    std::optional<double> conclusive_rate() const;
};

struct SessionStats {
    OutcomeCounts counts;
    std::optional<double> visibility;
    std::optional<double> error_rate;
    double multi_count_rate = 0;
    double loss_rate = 0;
    double detection_rate = 0;
    uint64_t key_bits = 0;
    EveStats eve;
};

/// Everything random about a round except the final measurement outcomes.
struct RoundKey {
    SettingsPair settings;
    Bb84 sent = Bb84::H;
    Basis bob_basis = Basis::Rectilinear;
    bool trojan_probe = false;
};

/// One leaf of the exact measurement tree of a round.
struct ExactLeaf {
    double probability = 0;
    Outcome outcome = Outcome::Null;
    bool bob_detected = false;
    std::optional<Bb84> bob_result;
    /// Eve's POVM probabilities {N, Y, inconclusive} on this leaf (D1 leaves only).
    std::array<double, 3> eve_povm{0, 0, 1};
};

/// Runs the amplitude-level pipeline for one configuration of a round:
/// source beamsplitter, onward loss, Eve's onward hook, Alice's and Bob's
/// switch actions, Eve's return hook, return loss, recombination.
std::vector<ExactLeaf> exact_round(const SessionConfig &cfg, const RoundKey &key);

/// Outcome probabilities for fixed settings, summed over leaves.
std::array<double, NUM_OUTCOMES> exact_outcome_distribution(
    const SessionConfig &cfg, SettingsPair settings, Bb84 sent = Bb84::H);

/// Detection-class probabilities P(class | settings) from the exact pipeline.
OutcomeTable exact_outcome_table(const SessionConfig &cfg);

/// Caches the exact leaf tables of every round configuration and samples rounds from them.
class RoundSimulator {
   public:
    explicit RoundSimulator(SessionConfig cfg);

    const SessionConfig &config() const {
        return cfg_;
    }
    /// Deterministic in (seed, index).
    RoundRecord run_round(uint64_t index) const;

   private:
    static size_t key_slot(const RoundKey &key);

    SessionConfig cfg_;
    std::vector<std::vector<ExactLeaf>> tables_;
};

RoundRecord run_round(const SessionConfig &cfg, uint64_t index);

struct KeyBit {
    uint64_t index;
    uint8_t bit;
};

struct SiftResult {
    /// Sorted round indices revealed for testing.
    std::vector<uint64_t> test_indices;
    /// Non-test D1 rounds with exactly one A setting.
    std::vector<KeyBit> key;
    OutcomeCounts test_counts;
    std::optional<double> test_visibility;
    std::optional<double> test_error_rate;
};

/// Selects round(f * n) rounds for the public test. Throws std::invalid_argument
/// when that leaves the test set empty.
SiftResult sift(std::span<const RoundRecord> records, double test_fraction, Rng &rng);

SessionStats compute_stats(std::span<const RoundRecord> records, const BeamsplitterParams &bs);

struct SessionResult {
    std::vector<RoundRecord> records;
    SessionStats stats;
    SiftResult sifted;
};

/// Runs all rounds (fanned out over cfg.workers threads), aggregates, sifts.
SessionResult run_session(const SessionConfig &cfg);

/// Bob-detection rounds whose receive tick does not match send tick + transit.
uint64_t trojan_timing_check(std::span<const RoundRecord> records);

struct PolarizationCheck {
    uint64_t compared = 0;
    uint64_t mismatches = 0;
    /// nullopt when no matching-basis Bob detection exists.
    std::optional<double> mismatch_rate;
};

PolarizationCheck trojan_polarization_check(std::span<const RoundRecord> records);

}  // namespace scqkd

#endif
