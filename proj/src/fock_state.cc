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
#include <stdexcept>
#include <string>

namespace scqkd {

namespace {

const Complex I_UNIT{0.0, 1.0};

double factorial(int n) {
    double r = 1;
    for (int k = 2; k <= n; k++) {
        r *= k;
    }
    return r;
}

double occupation_weight(const std::array<uint8_t, NUM_MODES> &occ) {
    double w = 1;
    for (auto n : occ) {
        w *= factorial(n);
    }
    return w;
}

void set_arm(BasisKet &ket, Arm arm, int nh, int nv) {
    ket.at(arm, PolMode::H) = static_cast<uint8_t>(nh);
    ket.at(arm, PolMode::V) = static_cast<uint8_t>(nv);
}

MeasurementBranch make_branch(SystemState projected) {
    MeasurementBranch b;
    b.probability = projected.norm2();
    if (b.probability > 0) {
        b.collapsed = projected.normalized();
    } else {
        b.collapsed = SystemState(projected.probe_dim());
    }
    return b;
}

// Groups kets by a key and returns renormalized branches in key order.
template <typename KeyFn>
std::map<std::invoke_result_t<KeyFn, const BasisKet &>, SystemState> split_by(const SystemState &state, KeyFn key) {
    std::map<std::invoke_result_t<KeyFn, const BasisKet &>, SystemState> parts;
    for (const auto &[ket, amp] : state.amplitudes()) {
        auto it = parts.try_emplace(key(ket), state.probe_dim()).first;
        it->second.add(ket, amp);
    }
    return parts;
}

void add_density(ProbeOperator &rho, const SystemState &state, double weight) {
    // Sum over optical configurations of |v><v| with v the probe column.
    size_t d = state.probe_dim();
    auto it = state.amplitudes().begin();
    auto end = state.amplitudes().end();
    while (it != end) {
        ProbeVector v = ProbeVector::Zero(static_cast<Eigen::Index>(d));
        auto occ = it->first.occ;
        while (it != end && it->first.occ == occ) {
            v(it->first.probe) += it->second;
            ++it;
        }
        rho += weight * v * v.adjoint();
    }
}

}  // namespace

Polarization Polarization::horizontal() {
    return {Complex{1, 0}, Complex{0, 0}};
}

Polarization Polarization::vertical() {
    return {Complex{0, 0}, Complex{1, 0}};
}

Polarization Polarization::diagonal() {
    return {Complex{M_SQRT1_2, 0}, Complex{M_SQRT1_2, 0}};
}

Polarization Polarization::antidiagonal() {
    return {Complex{M_SQRT1_2, 0}, Complex{-M_SQRT1_2, 0}};
}

void Polarization::validate() const {
    double n = std::norm(alpha) + std::norm(beta);
    if (std::abs(n - 1) > 1e-12) {
        throw std::invalid_argument("Polarization must satisfy |alpha|^2 + |beta|^2 = 1, got " + std::to_string(n));
    }
}

BeamsplitterParams BeamsplitterParams::from_transmittance(double transmittance) {
    BeamsplitterParams bs{transmittance, 1 - transmittance};
    bs.validate();
    return bs;
}

void BeamsplitterParams::validate() const {
    if (!(T >= 0 && T <= 1 && R >= 0 && R <= 1)) {
        throw std::invalid_argument("Beamsplitter transmittance and reflectance must lie in [0, 1].");
    }
    if (std::abs(T + R - 1) > 1e-12) {
        throw std::invalid_argument("Beamsplitter requires T + R = 1.");
    }
}

SystemState::SystemState(size_t probe_dim) : probe_dim_(probe_dim) {
    if (probe_dim == 0) {
        throw std::invalid_argument("Probe dimension must be at least 1.");
    }
}

SystemState SystemState::vacuum(size_t probe_dim) {
    SystemState s(probe_dim);
    s.add(BasisKet{}, 1);
    return s;
}

Complex SystemState::amplitude(const BasisKet &ket) const {
    auto it = amps_.find(ket);
    return it == amps_.end() ? Complex{} : it->second;
}

void SystemState::add(const BasisKet &ket, Complex amplitude) {
    if (ket.total_photons() > MAX_PHOTONS) {
        throw std::domain_error("Ket exceeds the Fock truncation of " + std::to_string(MAX_PHOTONS) + " photons.");
    }
    if (ket.probe >= probe_dim_) {
        throw std::out_of_range("Probe index out of range.");
    }
    amps_[ket] += amplitude;
}

double SystemState::norm2() const {
    double n = 0;
    for (const auto &[ket, amp] : amps_) {
        n += std::norm(amp);
    }
    return n;
}

SystemState SystemState::scaled(Complex factor) const {
    SystemState out(probe_dim_);
    for (const auto &[ket, amp] : amps_) {
        out.amps_.emplace(ket, amp * factor);
    }
    return out;
}

SystemState SystemState::normalized() const {
    double n = norm2();
    if (n <= 0) {
        throw std::domain_error("Cannot normalize a zero state.");
    }
    return scaled(1 / std::sqrt(n));
}

void SystemState::prune(double tolerance) {
    std::erase_if(amps_, [&](const auto &kv) {
        return std::abs(kv.second) < tolerance;
    });
}

SystemState initial_state(const BeamsplitterParams &bs, const Polarization &pol, size_t probe_dim) {
    bs.validate();
    pol.validate();
    SystemState s(probe_dim);
    Complex in_b = std::sqrt(bs.T);
    Complex in_a = I_UNIT * std::sqrt(bs.R);
    for (auto [mode, amp] : {std::pair{PolMode::H, pol.alpha}, std::pair{PolMode::V, pol.beta}}) {
        BasisKet kb;
        kb.at(Arm::B, mode) = 1;
        s.add(kb, in_b * amp);
        BasisKet ka;
        ka.at(Arm::A, mode) = 1;
        s.add(ka, in_a * amp);
    }
    s.prune();
    return s;
}

AbsorberSplit apply_absorber(const SystemState &state, Arm arm) {
    SystemState absorbed(state.probe_dim());
    SystemState passed(state.probe_dim());
    for (const auto &[ket, amp] : state.amplitudes()) {
        (ket.arm_photons(arm) > 0 ? absorbed : passed).add(ket, amp);
    }
    return {make_branch(std::move(absorbed)), make_branch(std::move(passed))};
}

SystemState apply_mirror(const SystemState &state, Arm) {
    return state;
}

Complex overlap(const SystemState &s1, const SystemState &s2) {
    if (s1.probe_dim() != s2.probe_dim()) {
        throw std::invalid_argument("overlap: probe dimensions differ.");
    }
    Complex total{};
    for (const auto &[ket, amp] : s1.amplitudes()) {
        total += std::conj(amp) * s2.amplitude(ket);
    }
    return total;
}

SystemState apply_mode_transform(const SystemState &state, const ModeMatrix &m) {
    SystemState out(state.probe_dim());
    struct Term {
        std::array<uint8_t, NUM_MODES> occ;
        Complex coef;
    };
    for (const auto &[ket, amp] : state.amplitudes()) {
        std::vector<Term> terms{{{}, Complex{1, 0}}};
        for (size_t k = 0; k < NUM_MODES; k++) {
            for (int copy = 0; copy < ket.occ[k]; copy++) {
                std::vector<Term> next;
                for (const auto &t : terms) {
                    for (size_t j = 0; j < NUM_MODES; j++) {
                        if (m[k][j] == Complex{}) {
                            continue;
                        }
                        Term n = t;
                        n.occ[j]++;
                        n.coef *= m[k][j];
                        next.push_back(n);
                    }
                }
                terms = std::move(next);
            }
        }
        double in_norm = 1 / std::sqrt(occupation_weight(ket.occ));
        for (const auto &t : terms) {
            BasisKet out_ket;
            out_ket.occ = t.occ;
            out_ket.probe = ket.probe;
            out.add(out_ket, amp * t.coef * in_norm * std::sqrt(occupation_weight(t.occ)));
        }
    }
    out.prune();
    return out;
}

ModeMatrix recombination_matrix(const BeamsplitterParams &bs) {
    bs.validate();
    Complex t = std::sqrt(bs.T);
    Complex r = I_UNIT * std::sqrt(bs.R);
    ModeMatrix m{};
    for (auto p : {PolMode::H, PolMode::V}) {
        size_t a = mode_index(Arm::A, p);
        size_t b = mode_index(Arm::B, p);
        // Slot A now stands for D1 and slot B for D2.
        m[a][a] = r;
        m[a][b] = t;
        m[b][a] = t;
        m[b][b] = r;
    }
    return m;
}

ModeMatrix diagonal_basis_matrix(Arm arm) {
    ModeMatrix m{};
    for (size_t k = 0; k < NUM_MODES; k++) {
        m[k][k] = 1;
    }
    size_t h = mode_index(arm, PolMode::H);
    size_t v = mode_index(arm, PolMode::V);
    // a_H^dag = (d^dag + a^dag)/sqrt2, a_V^dag = (d^dag - a^dag)/sqrt2.
    m[h][h] = M_SQRT1_2;
    m[h][v] = M_SQRT1_2;
    m[v][h] = M_SQRT1_2;
    m[v][v] = -M_SQRT1_2;
    return m;
}

double RecombineResult::probability(DetectorClass cls) const {
    double p = 0;
    for (const auto &b : branches) {
        if (b.cls == cls) {
            p += b.probability;
        }
    }
    return p;
}

ProbeOperator RecombineResult::probe_density(DetectorClass cls) const {
    double total = probability(cls);
    if (total <= 0) {
        throw std::domain_error("probe_density: detector class has zero probability.");
    }
    size_t d = branches.front().collapsed.probe_dim();
    ProbeOperator rho = ProbeOperator::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (const auto &b : branches) {
        if (b.cls == cls) {
            add_density(rho, b.collapsed, b.probability / total);
        }
    }
    return rho;
}

RecombineResult recombine(const SystemState &state, const BeamsplitterParams &bs) {
    SystemState out = apply_mode_transform(state, recombination_matrix(bs));
    auto parts = split_by(out, [](const BasisKet &k) {
        return std::pair{k.arm_photons(Arm::A), k.arm_photons(Arm::B)};
    });
    RecombineResult result;
    for (auto &[counts, part] : parts) {
        MeasurementBranch m = make_branch(std::move(part));
        if (m.probability <= 0) {
            continue;
        }
        DetectorBranch b;
        b.d1_photons = counts.first;
        b.d2_photons = counts.second;
        int total = counts.first + counts.second;
        if (total == 0) {
            b.cls = DetectorClass::NoPhoton;
        } else if (total > 1) {
            b.cls = DetectorClass::MultiCount;
        } else {
            b.cls = counts.first == 1 ? DetectorClass::D1 : DetectorClass::D2;
        }
        b.probability = m.probability;
        b.collapsed = std::move(m.collapsed);
        result.branches.push_back(std::move(b));
    }
    return result;
}

std::vector<ArmDetection> detect_arm(const SystemState &state, Arm arm) {
    auto parts = split_by(state, [arm](const BasisKet &k) {
        return std::pair{static_cast<int>(k.at(arm, PolMode::H)), static_cast<int>(k.at(arm, PolMode::V))};
    });
    std::vector<ArmDetection> out;
    for (auto &[counts, part] : parts) {
        SystemState cleared(state.probe_dim());
        for (const auto &[ket, amp] : part.amplitudes()) {
            BasisKet k = ket;
            set_arm(k, arm, 0, 0);
            cleared.add(k, amp);
        }
        MeasurementBranch m = make_branch(std::move(cleared));
        if (m.probability <= 0) {
            continue;
        }
        out.push_back({counts.first, counts.second, m.probability, std::move(m.collapsed)});
    }
    return out;
}

std::vector<ArmDetection> apply_arm_loss(const SystemState &state, Arm arm, double loss) {
    if (!(loss >= 0 && loss < 1)) {
        throw std::invalid_argument("Loss probability must lie in [0, 1).");
    }
    auto binom = [](int n, int k) {
        return factorial(n) / (factorial(k) * factorial(n - k));
    };
    std::map<std::pair<int, int>, SystemState> parts;
    for (const auto &[ket, amp] : state.amplitudes()) {
        int nh = ket.at(arm, PolMode::H);
        int nv = ket.at(arm, PolMode::V);
        for (int kh = 0; kh <= nh; kh++) {
            for (int kv = 0; kv <= nv; kv++) {
                double w = binom(nh, kh) * std::pow(loss, kh) * std::pow(1 - loss, nh - kh) * binom(nv, kv) *
                           std::pow(loss, kv) * std::pow(1 - loss, nv - kv);
                if (w <= 0) {
                    continue;
                }
                BasisKet k = ket;
                set_arm(k, arm, nh - kh, nv - kv);
                parts.try_emplace({kh, kv}, state.probe_dim()).first->second.add(k, amp * std::sqrt(w));
            }
        }
    }
    std::vector<ArmDetection> out;
    for (auto &[lost, part] : parts) {
        part.prune();
        MeasurementBranch m = make_branch(std::move(part));
        if (m.probability <= 0) {
            continue;
        }
        out.push_back({lost.first, lost.second, m.probability, std::move(m.collapsed)});
    }
    return out;
}

SystemState apply_probe_conditional(
    const SystemState &state, Arm arm, const ProbeOperator &if_empty, const ProbeOperator &if_occupied) {
    auto d = static_cast<Eigen::Index>(state.probe_dim());
    if (if_empty.rows() != d || if_empty.cols() != d || if_occupied.rows() != d || if_occupied.cols() != d) {
        throw std::invalid_argument("Probe operator dimension does not match the state.");
    }
    SystemState out(state.probe_dim());
    for (const auto &[ket, amp] : state.amplitudes()) {
        const ProbeOperator &op = ket.arm_photons(arm) == 0 ? if_empty : if_occupied;
        for (Eigen::Index p = 0; p < d; p++) {
            Complex c = op(p, ket.probe);
            if (c == Complex{}) {
                continue;
            }
            BasisKet k = ket;
            k.probe = static_cast<uint32_t>(p);
            out.add(k, amp * c);
        }
    }
    out.prune();
    return out;
}

size_t arm_block_dim(int max_arm_photons, size_t probe_dim) {
    size_t occs = static_cast<size_t>((max_arm_photons + 1) * (max_arm_photons + 2) / 2);
    return occs * probe_dim;
}

size_t arm_block_index(int nh, int nv, uint32_t probe, size_t probe_dim) {
    int n = nh + nv;
    size_t occ = static_cast<size_t>(n * (n + 1) / 2 + nv);
    return occ * probe_dim + probe;
}

SystemState apply_arm_probe_unitary(
    const SystemState &state, Arm arm, const Eigen::MatrixXcd &unitary, int max_arm_photons) {
    size_t d = state.probe_dim();
    size_t dim = arm_block_dim(max_arm_photons, d);
    if (static_cast<size_t>(unitary.rows()) != dim || static_cast<size_t>(unitary.cols()) != dim) {
        throw std::invalid_argument("Arm-probe unitary has the wrong dimension.");
    }
    std::vector<std::pair<int, int>> occ_of;
    for (int n = 0; n <= max_arm_photons; n++) {
        for (int nv = 0; nv <= n; nv++) {
            occ_of.emplace_back(n - nv, nv);
        }
    }

    std::map<BasisKet, Complex> acc;
    for (const auto &[ket, amp] : state.amplitudes()) {
        if (ket.arm_photons(arm) > max_arm_photons) {
            acc[ket] += amp;
            continue;
        }
        auto col = static_cast<Eigen::Index>(
            arm_block_index(ket.at(arm, PolMode::H), ket.at(arm, PolMode::V), ket.probe, d));
        for (Eigen::Index row = 0; row < static_cast<Eigen::Index>(dim); row++) {
            Complex c = unitary(row, col);
            if (c == Complex{}) {
                continue;
            }
            auto [nh, nv] = occ_of[static_cast<size_t>(row) / d];
            BasisKet k = ket;
            set_arm(k, arm, nh, nv);
            k.probe = static_cast<uint32_t>(static_cast<size_t>(row) % d);
            acc[k] += amp * c;
        }
    }
    SystemState out(d);
    for (const auto &[ket, amp] : acc) {
        if (std::abs(amp) < PRUNE_TOLERANCE) {
            continue;
        }
        // add() rejects kets past the truncation.
        out.add(ket, amp);
    }
    return out;
}

ProbeOperator reduced_probe_density(const SystemState &state) {
    auto d = static_cast<Eigen::Index>(state.probe_dim());
    ProbeOperator rho = ProbeOperator::Zero(d, d);
    add_density(rho, state, 1.0);
    return rho;
}

}  // namespace scqkd
