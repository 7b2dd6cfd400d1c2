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

#ifndef SCQKD_ADVERSARY_H
#define SCQKD_ADVERSARY_H

#include <array>
#include <optional>
#include <variant>

#include "scqkd/fock_state.h"
#include "scqkd/rng.h"

namespace scqkd {

enum class ReturnLeg : uint8_t { None, Unattack, General };

/// Eve's general incoherent attack on the exposed arm:
///   |0>_B|0>_E -> a00 |0>|eps00> + a0p |0perp>|eps0p>
///   |1>_B|0>_E -> a10 |1>|eps10> + a1p |1perp>|eps1p>
/// |0perp> is one H photon. |1perp> is the vacuum unless two_photon_perp is set,
/// in which case it is two photons of the input polarization.
struct GeneralIncoherentParams {
    Complex a00{1, 0};
    Complex a0p{0, 0};
    Complex a10{1, 0};
    Complex a1p{0, 0};
    ProbeVector eps00;
    ProbeVector eps0p;
    ProbeVector eps10;
    ProbeVector eps1p;
    /// Probe paired with a vacuum |1perp> for a V-polarized input photon. Must
    /// be orthogonal to eps1p and eps00 so the map stays an isometry.
    ProbeVector eps1p_v;
    ReturnLeg return_leg = ReturnLeg::None;
    bool two_photon_perp = false;

    /// Real amplitudes a0p, a1p with a00 = sqrt(1 - a0p^2), a10 = sqrt(1 - a1p^2)
    /// and probes eps00 = eps10 = e0, eps0p = e1, eps1p = e2, eps1p_v = e3.
    static GeneralIncoherentParams with_amplitudes(
        double a0p, double a1p, ReturnLeg return_leg = ReturnLeg::None, size_t probe_dim = DEFAULT_PROBE_DIM);

    /// Checks amplitude normalization and that the defined columns are orthonormal.
    void validate(size_t probe_dim) const;
};

/// Number-preserving attack U = |00><00| (x) U0 + (|01><01| + |10><10|) (x) U1
/// with <Y|N> = cos(theta). U0 = 1 and U1 rotates e0 towards e1 by theta.
struct NumberPreservingParams {
    double theta = 0;
    ReturnLeg return_leg = ReturnLeg::None;
    /// Probe unitaries U0', U1' for ReturnLeg::General. Empty means identity.
    ProbeOperator u0_return;
    ProbeOperator u1_return;

    void validate(size_t probe_dim) const;
};

struct NoAttack {};

using AttackModel = std::variant<NoAttack, GeneralIncoherentParams, NumberPreservingParams>;

ProbeVector probe_basis(size_t index, size_t probe_dim);
/// Real rotation by angle in the (e0, e1) plane, identity elsewhere.
ProbeOperator probe_rotation(double angle, size_t probe_dim);

ProbeOperator number_preserving_u0(double theta, size_t probe_dim);
ProbeOperator number_preserving_u1(double theta, size_t probe_dim);
/// |N> = U0|0>.
ProbeVector probe_n(double theta, size_t probe_dim);
/// |Y> = U1|0> = cos(theta) e0 + sin(theta) e1.
ProbeVector probe_y(double theta, size_t probe_dim);

/// Full unitary on the (arm B, probe) block extending the incoherent map.
Eigen::MatrixXcd incoherent_unitary(const GeneralIncoherentParams &p, size_t probe_dim);
/// Photon capacity of the block incoherent_unitary acts on.
int incoherent_block_photons(const GeneralIncoherentParams &p);

SystemState apply_general_incoherent(const SystemState &state, const GeneralIncoherentParams &p);
/// Return-leg action of the incoherent attack (identity or the inverse unitary).
SystemState apply_general_incoherent_return(const SystemState &state, const GeneralIncoherentParams &p);

SystemState apply_number_preserving(const SystemState &state, const NumberPreservingParams &p);
/// Return-leg action: nothing, U^dag, or |00><00| (x) U0' + (occupied) (x) U1'.
SystemState apply_return_leg(const SystemState &state, const NumberPreservingParams &p);

SystemState apply_onward_attack(const SystemState &state, const AttackModel &attack);
SystemState apply_return_attack(const SystemState &state, const AttackModel &attack);

enum class PovmOutcome : uint8_t { ConclusiveN, ConclusiveY, Inconclusive };

/// Unambiguous discrimination of |N> and |Y>:
///   M_N = (P - |Y><Y|) / (1 + |<N|Y>|),  M_Y = (P - |N><N|) / (1 + |<N|Y>|),
///   M_inconclusive = 1 - M_N - M_Y,
/// where P projects onto span{N, Y}.
struct Povm {
    ProbeOperator m_n;
    ProbeOperator m_y;
    ProbeOperator m_inconclusive;
};

Povm unambiguous_povm(const ProbeVector &n, const ProbeVector &y);

/// Born probabilities {N, Y, inconclusive} for a normalized probe density.
std::array<double, 3> povm_probabilities(const Povm &povm, const ProbeOperator &rho);
PovmOutcome sample_povm(const std::array<double, 3> &probabilities, Rng &rng);

/// Measures a pure probe with the POVM for the canonical |N>, |Y> at theta.
PovmOutcome povm_measure(const ProbeVector &probe, double theta, Rng &rng);

/// 1 - cos(theta).
double conclusive_probability(double theta);

/// ConclusiveN -> 1 (Bob applied A), ConclusiveY -> 0 (Alice applied A).
std::optional<uint8_t> eve_guess(PovmOutcome outcome);

/// Probe states Eve discriminates after her return-leg action:
/// N' = U0'U0|0>, Y' = U1'U1|0>.
std::pair<ProbeVector, ProbeVector> eve_reference_states(const NumberPreservingParams &p, size_t probe_dim);

const char *povm_outcome_name(PovmOutcome outcome);

}  // namespace scqkd

#endif
