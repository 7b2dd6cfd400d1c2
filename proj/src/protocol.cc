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

#include "scqkd/protocol.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace scqkd {

namespace {

struct Partial {
    double probability = 1;
    SystemState state;
    int alice_photons = 0;
    int bob_photons = 0;
    std::optional<Bb84> bob_result;
};

using Tree = std::vector<Partial>;

constexpr double LEAF_EPS = 1e-15;

Tree map_states(Tree tree, auto fn) {
    for (auto &p : tree) {
        p.state = fn(p.state);
    }
    return tree;
}

Tree expand(const Tree &tree, auto split, auto annotate) {
    Tree out;
    for (const auto &p : tree) {
        for (auto &branch : split(p.state)) {
            double prob = p.probability * branch.probability;
            if (prob <= LEAF_EPS) {
                continue;
            }
            Partial q = p;
            q.probability = prob;
            annotate(q, branch);
            q.state = std::move(branch.collapsed);
            out.push_back(std::move(q));
        }
    }
    return out;
}

Tree apply_loss(const Tree &tree, double loss) {
    if (loss == 0) {
        return tree;
    }
    return expand(
        tree, [&](const SystemState &s) { return apply_arm_loss(s, Arm::B, loss); }, [](Partial &, const auto &) {});
}

// Eve captures whatever is in arm b without it counting as a protocol detection.
Tree capture_arm_b(const Tree &tree) {
    return expand(
        tree, [](const SystemState &s) { return detect_arm(s, Arm::B); }, [](Partial &, const auto &) {});
}

SystemState inject_h_photon_b(const SystemState &s) {
    SystemState out(s.probe_dim());
    for (const auto &[ket, amp] : s.amplitudes()) {
        BasisKet k = ket;
        k.at(Arm::B, PolMode::H) = 1;
        out.add(k, amp);
    }
    return out;
}

std::optional<Bb84> polarization_result(Basis basis, int nh, int nv) {
    if (nh + nv != 1) {
        return std::nullopt;
    }
    if (basis == Basis::Rectilinear) {
        return nh == 1 ? Bb84::H : Bb84::V;
    }
    return nh == 1 ? Bb84::D : Bb84::A;
}

bool is_number_preserving(const AttackModel &attack) {
    return std::holds_alternative<NumberPreservingParams>(attack);
}

}  // namespace

Polarization bb84_polarization(Bb84 state) {
    switch (state) {
        case Bb84::H:
            return Polarization::horizontal();
        case Bb84::V:
            return Polarization::vertical();
        case Bb84::D:
            return Polarization::diagonal();
        case Bb84::A:
            return Polarization::antidiagonal();
    }
    throw std::logic_error("unreachable");
}

Basis basis_of(Bb84 state) {
    return state == Bb84::H || state == Bb84::V ? Basis::Rectilinear : Basis::Diagonal;
}

std::string_view bb84_name(Bb84 state) {
    static constexpr std::string_view names[] = {"H", "V", "D", "A"};
    return names[static_cast<size_t>(state)];
}

std::string_view basis_name(Basis basis) {
    return basis == Basis::Rectilinear ? "rect" : "diag";
}

void SessionConfig::validate() const {
    if (rounds < 1) {
        throw std::invalid_argument("rounds must be at least 1.");
    }
    if (!(test_fraction > 0 && test_fraction < 1)) {
        throw std::invalid_argument("test fraction must lie in (0, 1).");
    }
    if (test_fraction * static_cast<double>(rounds) < 1) {
        throw std::invalid_argument("test fraction times rounds must be at least 1.");
    }
    bs.validate();
    if (!(loss >= 0 && loss < 1)) {
        throw std::invalid_argument("loss must lie in [0, 1).");
    }
    if (!(trojan_probe >= 0 && trojan_probe <= 1)) {
        throw std::invalid_argument("trojan probe rate must lie in [0, 1].");
    }
    if (timing.period < 1 || timing.transit < 0 || timing.jitter_window < 1 ||
        timing.jitter_window > timing.period) {
        throw std::invalid_argument("timing needs period >= jitter window >= 1 and transit >= 0.");
    }
    if (workers < 1) {
        throw std::invalid_argument("workers must be at least 1.");
    }
    std::visit(
        [&](const auto &a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (!std::is_same_v<T, NoAttack>) {
                a.validate(probe_dim);
            }
        },
        attack);
}

std::optional<double> EveStats::conclusive_rate() const {
    if (measured == 0) {
        return std::nullopt;
    }
    return static_cast<double>(conclusive) / static_cast<double>(measured);
}

std::vector<ExactLeaf> exact_round(const SessionConfig &cfg, const RoundKey &key) {
    const bool pol_check = polarization_defense(cfg.trojan);
    Partial root;
    root.state = initial_state(cfg.bs, bb84_polarization(key.sent), cfg.probe_dim);
    Tree tree{root};

    tree = apply_loss(tree, cfg.loss);
    if (key.trojan_probe) {
        tree = map_states(capture_arm_b(tree), inject_h_photon_b);
    } else {
        tree = map_states(tree, [&](const SystemState &s) { return apply_onward_attack(s, cfg.attack); });
    }

    if (key.settings.alice == SwitchSetting::A) {
        tree = expand(
            tree,
            [](const SystemState &s) { return detect_arm(s, Arm::A); },
            [](Partial &p, const ArmDetection &d) { p.alice_photons += d.photons_h + d.photons_v; });
    } else {
        tree = map_states(tree, [](const SystemState &s) { return apply_mirror(s, Arm::A); });
    }

    if (key.settings.bob == SwitchSetting::A) {
        if (pol_check && key.bob_basis == Basis::Diagonal) {
            tree = map_states(
                tree, [](const SystemState &s) { return apply_mode_transform(s, diagonal_basis_matrix(Arm::B)); });
        }
        tree = expand(
            tree,
            [](const SystemState &s) { return detect_arm(s, Arm::B); },
            [&](Partial &p, const ArmDetection &d) {
                p.bob_photons += d.photons_h + d.photons_v;
                if (pol_check) {
                    p.bob_result = polarization_result(key.bob_basis, d.photons_h, d.photons_v);
                }
            });
    } else {
        tree = map_states(tree, [](const SystemState &s) { return apply_mirror(s, Arm::B); });
    }

    if (key.trojan_probe) {
        tree = capture_arm_b(tree);
    } else {
        tree = map_states(tree, [&](const SystemState &s) { return apply_return_attack(s, cfg.attack); });
    }
    tree = apply_loss(tree, cfg.loss);

    std::optional<Povm> povm;
    if (!key.trojan_probe && is_number_preserving(cfg.attack)) {
        auto [n, y] = eve_reference_states(std::get<NumberPreservingParams>(cfg.attack), cfg.probe_dim);
        povm = unambiguous_povm(n, y);
    }

    std::vector<ExactLeaf> leaves;
    for (const auto &p : tree) {
        RecombineResult rec = recombine(p.state, cfg.bs);
        for (const auto &b : rec.branches) {
            double prob = p.probability * b.probability;
            if (prob <= LEAF_EPS) {
                continue;
            }
            ExactLeaf leaf;
            leaf.probability = prob;
            leaf.bob_detected = p.bob_photons > 0;
            leaf.bob_result = p.bob_result;
            int total = p.alice_photons + p.bob_photons + b.d1_photons + b.d2_photons;
            if (total >= 2) {
                leaf.outcome = Outcome::MultiCount;
            } else if (total == 0) {
                leaf.outcome = Outcome::Null;
            } else if (p.alice_photons == 1) {
                leaf.outcome = Outcome::AliceAbsorb;
            } else if (p.bob_photons == 1) {
                leaf.outcome = Outcome::BobAbsorb;
            } else {
                leaf.outcome = b.d1_photons == 1 ? Outcome::D1 : Outcome::D2;
            }
            if (povm && leaf.outcome == Outcome::D1) {
                leaf.eve_povm = povm_probabilities(*povm, reduced_probe_density(b.collapsed));
            }
            leaves.push_back(leaf);
        }
    }
    return leaves;
}

std::array<double, NUM_OUTCOMES> exact_outcome_distribution(
    const SessionConfig &cfg, SettingsPair settings, Bb84 sent) {
    std::array<double, NUM_OUTCOMES> dist{};
    for (const auto &leaf : exact_round(cfg, RoundKey{settings, sent, Basis::Rectilinear, false})) {
        dist[static_cast<size_t>(leaf.outcome)] += leaf.probability;
    }
    return dist;
}

OutcomeTable exact_outcome_table(const SessionConfig &cfg) {
    OutcomeTable t{};
    for (size_t s = 0; s < NUM_SETTINGS; s++) {
        auto dist = exact_outcome_distribution(cfg, SettingsPair::from_index(s));
        for (size_t o = 0; o < NUM_OUTCOMES; o++) {
            if (auto c = detection_class(static_cast<Outcome>(o))) {
                t[s][static_cast<size_t>(*c)] += dist[o];
            }
        }
    }
    return t;
}

size_t RoundSimulator::key_slot(const RoundKey &key) {
    return ((key.settings.index() * 4 + static_cast<size_t>(key.sent)) * 2 + static_cast<size_t>(key.bob_basis)) * 2 +
           (key.trojan_probe ? 1 : 0);
}

RoundSimulator::RoundSimulator(SessionConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    tables_.resize(NUM_SETTINGS * 4 * 2 * 2);
    const bool pol = polarization_defense(cfg_.trojan);
    for (size_t s = 0; s < NUM_SETTINGS; s++) {
        for (size_t sent = 0; sent < (pol ? 4u : 1u); sent++) {
            for (size_t basis = 0; basis < (pol ? 2u : 1u); basis++) {
                for (bool trojan : {false, true}) {
                    if (trojan && cfg_.trojan_probe == 0) {
                        continue;
                    }
                    RoundKey key{
                        SettingsPair::from_index(s), static_cast<Bb84>(sent), static_cast<Basis>(basis), trojan};
                    tables_[key_slot(key)] = exact_round(cfg_, key);
                }
            }
        }
    }
}

RoundRecord RoundSimulator::run_round(uint64_t index) const {
    Rng rng = Rng::for_stream(cfg_.seed, index);
    const bool pol = polarization_defense(cfg_.trojan);

    RoundKey key;
    key.settings.alice = rng.coin() ? SwitchSetting::A : SwitchSetting::F;
    key.settings.bob = rng.coin() ? SwitchSetting::A : SwitchSetting::F;
    if (pol) {
        key.sent = static_cast<Bb84>(rng.below(4));
        key.bob_basis = rng.coin() ? Basis::Diagonal : Basis::Rectilinear;
    }
    int64_t jitter = timing_defense(cfg_.trojan) ? static_cast<int64_t>(rng.below(
                                                       static_cast<uint64_t>(cfg_.timing.jitter_window)))
                                                 : 0;
    if (cfg_.trojan_probe > 0) {
        key.trojan_probe = rng.uniform() < cfg_.trojan_probe;
    }

    const auto &leaves = tables_[key_slot(key)];
    double u = rng.uniform();
    const ExactLeaf *chosen = &leaves.back();
    double acc = 0;
    for (const auto &leaf : leaves) {
        acc += leaf.probability;
        if (u < acc) {
            chosen = &leaf;
            break;
        }
    }

    RoundRecord r;
    r.index = index;
    r.settings = key.settings;
    r.sent_pol = key.sent;
    int64_t nominal = static_cast<int64_t>(index) * cfg_.timing.period;
    r.send_tick = nominal + jitter;
    r.transit = cfg_.timing.transit;
    r.outcome = chosen->outcome;
    r.trojan_probe = key.trojan_probe;
    if (chosen->bob_detected) {
        // A probe photon follows Eve's guess of the schedule, not Alice's jittered send time.
        r.bob_receive_tick = (key.trojan_probe ? nominal : r.send_tick) + cfg_.timing.transit;
        if (pol && chosen->bob_result) {
            r.bob_pol = BobPolarization{key.bob_basis, *chosen->bob_result};
        }
    }
    if (r.outcome == Outcome::D1) {
        if (key.settings == FA) {
            r.sifted_bit = 1;
        } else if (key.settings == AF) {
            r.sifted_bit = 0;
        }
        if (!key.trojan_probe && is_number_preserving(cfg_.attack)) {
            r.eve_outcome = sample_povm(chosen->eve_povm, rng);
        }
    }
    return r;
}

RoundRecord run_round(const SessionConfig &cfg, uint64_t index) {
    return RoundSimulator(cfg).run_round(index);
}

SiftResult sift(std::span<const RoundRecord> records, double test_fraction, Rng &rng) {
    const uint64_t n = records.size();
    const auto k = static_cast<uint64_t>(std::llround(test_fraction * static_cast<double>(n)));
    if (n == 0 || k == 0) {
        throw std::invalid_argument("sift: the test set would be empty.");
    }
    std::vector<uint64_t> order(n);
    for (uint64_t i = 0; i < n; i++) {
        order[i] = i;
    }
    for (uint64_t i = 0; i < k; i++) {
        std::swap(order[i], order[i + rng.below(n - i)]);
    }
    std::vector<bool> in_test(n, false);
    SiftResult result;
    for (uint64_t i = 0; i < k; i++) {
        in_test[order[i]] = true;
    }
    for (uint64_t i = 0; i < n; i++) {
        const auto &r = records[i];
        if (in_test[i]) {
            result.test_indices.push_back(r.index);
            result.test_counts.at(r.settings, r.outcome)++;
        } else if (r.sifted_bit) {
            result.key.push_back({r.index, *r.sifted_bit});
        }
    }
    result.test_visibility = visibility_from_counts(result.test_counts);
    result.test_error_rate = error_rate_from_counts(result.test_counts);
    return result;
}

SessionStats compute_stats(std::span<const RoundRecord> records, const BeamsplitterParams &bs) {
    SessionStats st;
    for (const auto &r : records) {
        st.counts.at(r.settings, r.outcome)++;
        if (r.sifted_bit && r.eve_outcome) {
            st.eve.measured++;
            if (auto g = eve_guess(*r.eve_outcome)) {
                st.eve.conclusive++;
                st.eve.correct += *g == *r.sifted_bit ? 1 : 0;
            }
        }
    }
    double n = static_cast<double>(records.size());
    st.visibility = visibility_from_counts(st.counts);
    st.error_rate = error_rate_from_counts(st.counts);
    if (n > 0) {
        st.multi_count_rate = static_cast<double>(st.counts.outcome_total(Outcome::MultiCount)) / n;
        st.detection_rate = static_cast<double>(st.counts.outcome_total(Outcome::D1)) / n;
    }
    // With both switches on A only onward loss in arm b leaves a round without any detection.
    double n_aa = static_cast<double>(st.counts.settings_total(AA));
    if (n_aa > 0 && bs.T > 0) {
        st.loss_rate = std::clamp(static_cast<double>(st.counts.at(AA, Outcome::Null)) / (bs.T * n_aa), 0.0, 1.0);
    }
    return st;
}

SessionResult run_session(const SessionConfig &cfg) {
    RoundSimulator sim(cfg);
    SessionResult result;
    result.records.resize(cfg.rounds);

    size_t workers = std::min<size_t>(cfg.workers, cfg.rounds);
    auto work = [&](size_t w) {
        uint64_t begin = cfg.rounds * w / workers;
        uint64_t end = cfg.rounds * (w + 1) / workers;
        for (uint64_t i = begin; i < end; i++) {
            result.records[i] = sim.run_round(i);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (size_t w = 0; w < workers; w++) {
            pool.emplace_back(work, w);
        }
    }

    result.stats = compute_stats(result.records, cfg.bs);
    Rng rng = Rng::for_stream(cfg.seed, SIFT_STREAM);
    result.sifted = sift(result.records, cfg.test_fraction, rng);
    result.stats.key_bits = result.sifted.key.size();
    return result;
}

uint64_t trojan_timing_check(std::span<const RoundRecord> records) {
    uint64_t violations = 0;
    for (const auto &r : records) {
        if (r.bob_receive_tick && r.send_tick != *r.bob_receive_tick - r.transit) {
            violations++;
        }
    }
    return violations;
}

PolarizationCheck trojan_polarization_check(std::span<const RoundRecord> records) {
    PolarizationCheck c;
    for (const auto &r : records) {
        if (!r.bob_pol || r.bob_pol->basis != basis_of(r.sent_pol)) {
            continue;
        }
        c.compared++;
        if (r.bob_pol->result != r.sent_pol) {
            c.mismatches++;
        }
    }
    if (c.compared > 0) {
        c.mismatch_rate = static_cast<double>(c.mismatches) / static_cast<double>(c.compared);
    }
    return c;
}

}  // namespace scqkd
