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

#include "scqkd/adversary.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scqkd {

namespace {

using Index = Eigen::Index;

ProbeOperator identity_or(const ProbeOperator &op, size_t d) {
    if (op.size() == 0) {
        return ProbeOperator::Identity(static_cast<Index>(d), static_cast<Index>(d));
    }
    if (op.rows() != static_cast<Index>(d) || op.cols() != static_cast<Index>(d)) {
        throw std::invalid_argument("Return-leg probe unitary has the wrong dimension.");
    }
    return op;
}

void require_unitary(const ProbeOperator &u, const char *what) {
    if (!(u.adjoint() * u).isIdentity(1e-10)) {
        throw std::invalid_argument(std::string(what) + " is not unitary.");
    }
}

void require_probe(const ProbeVector &v, size_t d, const char *what) {
    if (v.size() != static_cast<Index>(d)) {
        throw std::invalid_argument(std::string(what) + " has the wrong probe dimension.");
    }
    if (std::abs(v.squaredNorm() - 1) > 1e-12) {
        throw std::invalid_argument(std::string(what) + " is not a unit vector.");
    }
}

// The three columns the incoherent map defines, keyed by input block index.
std::vector<std::pair<size_t, Eigen::VectorXcd>> defined_columns(
    const GeneralIncoherentParams &p, size_t d, int block_photons) {
    auto dim = static_cast<Index>(arm_block_dim(block_photons, d));
    auto place = [&](Eigen::VectorXcd &col, int nh, int nv, Complex amp, const ProbeVector &probe) {
        for (Index k = 0; k < probe.size(); k++) {
            col(static_cast<Index>(arm_block_index(nh, nv, static_cast<uint32_t>(k), d))) += amp * probe(k);
        }
    };

    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(dim);
    place(vac, 0, 0, p.a00, p.eps00);
    place(vac, 1, 0, p.a0p, p.eps0p);

    Eigen::VectorXcd one_h = Eigen::VectorXcd::Zero(dim);
    place(one_h, 1, 0, p.a10, p.eps10);
    Eigen::VectorXcd one_v = Eigen::VectorXcd::Zero(dim);
    place(one_v, 0, 1, p.a10, p.eps10);
    if (p.two_photon_perp) {
        place(one_h, 2, 0, p.a1p, p.eps1p);
        place(one_v, 0, 2, p.a1p, p.eps1p);
    } else {
        place(one_h, 0, 0, p.a1p, p.eps1p);
        place(one_v, 0, 0, p.a1p, p.eps1p_v);
    }
    return {
        {arm_block_index(0, 0, 0, d), vac},
        {arm_block_index(1, 0, 0, d), one_h},
        {arm_block_index(0, 1, 0, d), one_v},
    };
}

}  // namespace

ProbeVector probe_basis(size_t index, size_t probe_dim) {
    if (index >= probe_dim) {
        throw std::out_of_range("Probe basis index out of range.");
    }
    ProbeVector v = ProbeVector::Zero(static_cast<Index>(probe_dim));
    v(static_cast<Index>(index)) = 1;
    return v;
}

ProbeOperator probe_rotation(double angle, size_t probe_dim) {
    if (probe_dim < 2) {
        throw std::invalid_argument("Probe rotation needs a probe dimension of at least 2.");
    }
    ProbeOperator u = ProbeOperator::Identity(static_cast<Index>(probe_dim), static_cast<Index>(probe_dim));
    u(0, 0) = std::cos(angle);
    u(1, 0) = std::sin(angle);
    u(0, 1) = -std::sin(angle);
    u(1, 1) = std::cos(angle);
    return u;
}

ProbeOperator number_preserving_u0(double, size_t probe_dim) {
    return ProbeOperator::Identity(static_cast<Index>(probe_dim), static_cast<Index>(probe_dim));
}

ProbeOperator number_preserving_u1(double theta, size_t probe_dim) {
    return probe_rotation(theta, probe_dim);
}

ProbeVector probe_n(double theta, size_t probe_dim) {
    return number_preserving_u0(theta, probe_dim).col(0);
}

ProbeVector probe_y(double theta, size_t probe_dim) {
    return number_preserving_u1(theta, probe_dim).col(0);
}

GeneralIncoherentParams GeneralIncoherentParams::with_amplitudes(
    double a0p, double a1p, ReturnLeg return_leg, size_t probe_dim) {
    if (!(a0p >= 0 && a0p <= 1 && a1p >= 0 && a1p <= 1)) {
        throw std::invalid_argument("Incoherent attack amplitudes must lie in [0, 1].");
    }
    if (probe_dim < 4) {
        throw std::invalid_argument("The incoherent attack needs a probe dimension of at least 4.");
    }
    GeneralIncoherentParams p;
    p.a00 = std::sqrt(1 - a0p * a0p);
    p.a0p = a0p;
    p.a10 = std::sqrt(1 - a1p * a1p);
    p.a1p = a1p;
    p.eps00 = probe_basis(0, probe_dim);
    p.eps0p = probe_basis(1, probe_dim);
    p.eps10 = probe_basis(0, probe_dim);
    p.eps1p = probe_basis(2, probe_dim);
    p.eps1p_v = probe_basis(3, probe_dim);
    p.return_leg = return_leg;
    return p;
}

void GeneralIncoherentParams::validate(size_t probe_dim) const {
    if (std::abs(std::norm(a00) + std::norm(a0p) - 1) > 1e-12 ||
        std::abs(std::norm(a10) + std::norm(a1p) - 1) > 1e-12) {
        throw std::invalid_argument("Incoherent attack requires |a00|^2+|a0p|^2 = 1 and |a10|^2+|a1p|^2 = 1.");
    }
    if (return_leg == ReturnLeg::General) {
        throw std::invalid_argument("The incoherent attack supports only none or unattack on the return leg.");
    }
    require_probe(eps00, probe_dim, "eps00");
    require_probe(eps0p, probe_dim, "eps0p");
    require_probe(eps10, probe_dim, "eps10");
    require_probe(eps1p, probe_dim, "eps1p");
    if (!two_photon_perp) {
        require_probe(eps1p_v, probe_dim, "eps1p_v");
    }
    auto cols = defined_columns(*this, probe_dim, incoherent_block_photons(*this));
    for (size_t i = 0; i < cols.size(); i++) {
        for (size_t j = 0; j < cols.size(); j++) {
            Complex g = cols[i].second.dot(cols[j].second);
            if (std::abs(g - Complex(i == j ? 1.0 : 0.0)) > 1e-10) {
                throw std::invalid_argument(
                    "Incoherent attack is not an isometry for these probe states; "
                    "choose probes that keep the images orthonormal.");
            }
        }
    }
}

int incoherent_block_photons(const GeneralIncoherentParams &p) {
    return p.two_photon_perp ? 2 : 1;
}

Eigen::MatrixXcd incoherent_unitary(const GeneralIncoherentParams &p, size_t probe_dim) {
    p.validate(probe_dim);
    int photons = incoherent_block_photons(p);
    auto dim = static_cast<Index>(arm_block_dim(photons, probe_dim));
    auto cols = defined_columns(p, probe_dim, photons);

    std::vector<Eigen::VectorXcd> basis;
    for (const auto &c : cols) {
        basis.push_back(c.second);
    }
    // Gram-Schmidt over the canonical basis fills the remaining columns.
    for (Index k = 0; k < dim && static_cast<Index>(basis.size()) < dim; k++) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
        v(k) = 1;
        for (int pass = 0; pass < 2; pass++) {
            for (const auto &q : basis) {
                v -= q * q.dot(v);
            }
        }
        double n = v.norm();
        if (n > 1e-8) {
            basis.push_back(v / n);
        }
    }

    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<bool> assigned(static_cast<size_t>(dim), false);
    for (size_t i = 0; i < cols.size(); i++) {
        u.col(static_cast<Index>(cols[i].first)) = basis[i];
        assigned[cols[i].first] = true;
    }
    size_t next = cols.size();
    for (Index k = 0; k < dim; k++) {
        if (!assigned[static_cast<size_t>(k)]) {
            u.col(k) = basis[next++];
        }
    }
    return u;
}

SystemState apply_general_incoherent(const SystemState &state, const GeneralIncoherentParams &p) {
    return apply_arm_probe_unitary(
        state, Arm::B, incoherent_unitary(p, state.probe_dim()), incoherent_block_photons(p));
}

SystemState apply_general_incoherent_return(const SystemState &state, const GeneralIncoherentParams &p) {
    if (p.return_leg == ReturnLeg::None) {
        return state;
    }
    return apply_arm_probe_unitary(
        state, Arm::B, incoherent_unitary(p, state.probe_dim()).adjoint(), incoherent_block_photons(p));
}

void NumberPreservingParams::validate(size_t probe_dim) const {
    if (!(theta >= 0 && theta <= std::numbers::pi / 2 + 1e-15)) {
        throw std::invalid_argument("Number-preserving attack angle must lie in [0, pi/2].");
    }
    if (probe_dim < 2) {
        throw std::invalid_argument("The number-preserving attack needs a probe dimension of at least 2.");
    }
    if (return_leg == ReturnLeg::General) {
        require_unitary(identity_or(u0_return, probe_dim), "U0'");
        require_unitary(identity_or(u1_return, probe_dim), "U1'");
    }
}

SystemState apply_number_preserving(const SystemState &state, const NumberPreservingParams &p) {
    size_t d = state.probe_dim();
    p.validate(d);
    return apply_probe_conditional(
        state, Arm::B, number_preserving_u0(p.theta, d), number_preserving_u1(p.theta, d));
}

SystemState apply_return_leg(const SystemState &state, const NumberPreservingParams &p) {
    size_t d = state.probe_dim();
    switch (p.return_leg) {
        case ReturnLeg::None:
            return state;
        case ReturnLeg::Unattack:
            return apply_probe_conditional(
                state,
                Arm::B,
                number_preserving_u0(p.theta, d).adjoint(),
                number_preserving_u1(p.theta, d).adjoint());
        case ReturnLeg::General:
            return apply_probe_conditional(state, Arm::B, identity_or(p.u0_return, d), identity_or(p.u1_return, d));
    }
    throw std::logic_error("unreachable");
}

SystemState apply_onward_attack(const SystemState &state, const AttackModel &attack) {
    return std::visit(
        [&](const auto &a) -> SystemState {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, GeneralIncoherentParams>) {
                return apply_general_incoherent(state, a);
            } else if constexpr (std::is_same_v<T, NumberPreservingParams>) {
                return apply_number_preserving(state, a);
            } else {
                return state;
            }
        },
        attack);
}

SystemState apply_return_attack(const SystemState &state, const AttackModel &attack) {
    return std::visit(
        [&](const auto &a) -> SystemState {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, GeneralIncoherentParams>) {
                return apply_general_incoherent_return(state, a);
            } else if constexpr (std::is_same_v<T, NumberPreservingParams>) {
                return apply_return_leg(state, a);
            } else {
                return state;
            }
        },
        attack);
}

Povm unambiguous_povm(const ProbeVector &n, const ProbeVector &y) {
    if (n.size() != y.size()) {
        throw std::invalid_argument("POVM reference states differ in dimension.");
    }
    auto d = n.size();
    ProbeVector nn = n.normalized();
    ProbeVector yy = y.normalized();
    double c = std::abs(nn.dot(yy));

    ProbeOperator span = nn * nn.adjoint();
    ProbeVector rest = yy - nn * nn.dot(yy);
    if (rest.norm() > 1e-12) {
        rest.normalize();
        span += rest * rest.adjoint();
    }
    Povm povm;
    povm.m_n = (span - yy * yy.adjoint()) / (1 + c);
    povm.m_y = (span - nn * nn.adjoint()) / (1 + c);
    povm.m_inconclusive = ProbeOperator::Identity(d, d) - povm.m_n - povm.m_y;

    // Positivity holds for every pair of unit vectors; a failure means a bug here.
    for (const ProbeOperator *m : {&povm.m_n, &povm.m_y, &povm.m_inconclusive}) {
        Eigen::SelfAdjointEigenSolver<ProbeOperator> es(*m);
        if (es.eigenvalues().minCoeff() < -1e-10) {
            throw std::logic_error("POVM element is not positive semidefinite.");
        }
    }
    return povm;
}

std::array<double, 3> povm_probabilities(const Povm &povm, const ProbeOperator &rho) {
    std::array<double, 3> p{
        (povm.m_n * rho).trace().real(),
        (povm.m_y * rho).trace().real(),
        (povm.m_inconclusive * rho).trace().real(),
    };
    for (auto &x : p) {
        x = std::clamp(x, 0.0, 1.0);
    }
    return p;
}

PovmOutcome sample_povm(const std::array<double, 3> &probabilities, Rng &rng) {
    double u = rng.uniform();
    if (u < probabilities[0]) {
        return PovmOutcome::ConclusiveN;
    }
    if (u < probabilities[0] + probabilities[1]) {
        return PovmOutcome::ConclusiveY;
    }
    return PovmOutcome::Inconclusive;
}

PovmOutcome povm_measure(const ProbeVector &probe, double theta, Rng &rng) {
    size_t d = static_cast<size_t>(probe.size());
    Povm povm = unambiguous_povm(probe_n(theta, d), probe_y(theta, d));
    ProbeVector v = probe.normalized();
    return sample_povm(povm_probabilities(povm, v * v.adjoint()), rng);
}

double conclusive_probability(double theta) {
    return 1 - std::cos(theta);
}

std::optional<uint8_t> eve_guess(PovmOutcome outcome) {
    switch (outcome) {
        case PovmOutcome::ConclusiveN:
            return 1;
        case PovmOutcome::ConclusiveY:
            return 0;
        case PovmOutcome::Inconclusive:
            return std::nullopt;
    }
    return std::nullopt;
}

std::pair<ProbeVector, ProbeVector> eve_reference_states(const NumberPreservingParams &p, size_t probe_dim) {
    ProbeOperator u0 = number_preserving_u0(p.theta, probe_dim);
    ProbeOperator u1 = number_preserving_u1(p.theta, probe_dim);
    ProbeOperator r0 = ProbeOperator::Identity(static_cast<Index>(probe_dim), static_cast<Index>(probe_dim));
    ProbeOperator r1 = r0;
    if (p.return_leg == ReturnLeg::Unattack) {
        r0 = u0.adjoint();
        r1 = u1.adjoint();
    } else if (p.return_leg == ReturnLeg::General) {
        r0 = identity_or(p.u0_return, probe_dim);
        r1 = identity_or(p.u1_return, probe_dim);
    }
    return {(r0 * u0).col(0), (r1 * u1).col(0)};
}

const char *povm_outcome_name(PovmOutcome outcome) {
    switch (outcome) {
        case PovmOutcome::ConclusiveN:
            return "N";
        case PovmOutcome::ConclusiveY:
            return "Y";
        case PovmOutcome::Inconclusive:
            return "?";
    }
    return "?";
}

}  // namespace scqkd
