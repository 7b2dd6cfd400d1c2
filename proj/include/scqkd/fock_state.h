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

#ifndef SCQKD_FOCK_STATE_H
#define SCQKD_FOCK_STATE_H

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace scqkd {

using Complex = std::complex<double>;
/// State vector of Eve's probe.
using ProbeVector = Eigen::VectorXcd;
/// Operator on Eve's probe space (unitaries, POVM elements, densities).
using ProbeOperator = Eigen::MatrixXcd;

/// Largest total photon number kept in the truncated Fock space.
constexpr int MAX_PHOTONS = 2;
constexpr size_t DEFAULT_PROBE_DIM = 4;
/// Amplitudes with magnitude below this are dropped after every element.
constexpr double PRUNE_TOLERANCE = 1e-14;

enum class Arm : uint8_t { A = 0, B = 1 };
enum class PolMode : uint8_t { H = 0, V = 1 };

constexpr size_t NUM_MODES = 4;
constexpr size_t mode_index(Arm arm, PolMode pol) {
    return 2 * static_cast<size_t>(arm) + static_cast<size_t>(pol);
}

/// Single-photon polarization alpha|H> + beta|V>.
struct Polarization {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};

    static Polarization horizontal();
    static Polarization vertical();
    static Polarization diagonal();
    static Polarization antidiagonal();

    /// Throws std::invalid_argument unless |alpha|^2 + |beta|^2 = 1 within 1e-12.
    void validate() const;
};

/// Transmittance and reflectance probabilities of a lossless beamsplitter.
struct BeamsplitterParams {
    double T = 0.5;
    double R = 0.5;

    static BeamsplitterParams from_transmittance(double transmittance);
    /// Throws std::invalid_argument unless both lie in [0,1] and T + R = 1 within 1e-12.
    void validate() const;
};

/// Occupation numbers of the four optical modes plus an index into the probe basis.
///
/// Modes are (arm, polarization) pairs laid out by mode_index(). After
/// recombine() the arm-A slots hold detector D1 and the arm-B slots hold D2.
struct BasisKet {
    std::array<uint8_t, NUM_MODES> occ{};
    uint32_t probe = 0;

    uint8_t &at(Arm arm, PolMode pol) {
        return occ[mode_index(arm, pol)];
    }
    uint8_t at(Arm arm, PolMode pol) const {
        return occ[mode_index(arm, pol)];
    }
    int arm_photons(Arm arm) const {
        return at(arm, PolMode::H) + at(arm, PolMode::V);
    }
    int total_photons() const {
        return occ[0] + occ[1] + occ[2] + occ[3];
    }

    auto operator<=>(const BasisKet &) const = default;
};

/// Sparse pure state over the truncated Fock space tensored with the probe.
///
/// Kets are kept in canonical (lexicographic) order so iteration, and every
/// floating-point sum built from it, is deterministic.
class SystemState {
   public:
    explicit SystemState(size_t probe_dim = DEFAULT_PROBE_DIM);

    /// All modes empty, probe in |0>.
    static SystemState vacuum(size_t probe_dim = DEFAULT_PROBE_DIM);

    size_t probe_dim() const {
        return probe_dim_;
    }
    const std::map<BasisKet, Complex> &amplitudes() const {
        return amps_;
    }
    bool empty() const {
        return amps_.empty();
    }

    Complex amplitude(const BasisKet &ket) const;
    /// Accumulates into the amplitude of ket. Throws if the ket is outside the truncation.
    void add(const BasisKet &ket, Complex amplitude);
    double norm2() const;
    SystemState scaled(Complex factor) const;
    /// Copy rescaled to unit norm. Throws std::domain_error on a zero state.
    SystemState normalized() const;
    void prune(double tolerance = PRUNE_TOLERANCE);

   private:
    size_t probe_dim_;
    std::map<BasisKet, Complex> amps_;
};

/// One outcome of a projective measurement; `collapsed` is renormalized unless
/// the probability is zero, in which case it is the empty state.
struct MeasurementBranch {
    double probability = 0;
    SystemState collapsed;
};

struct AbsorberSplit {
    MeasurementBranch absorbed;
    MeasurementBranch passed;
};

/// State right after the source beamsplitter:
///   sqrt(T) |00>_A |psi>_B + i sqrt(R) |psi>_A |00>_B, probe in |0>.
SystemState initial_state(
    const BeamsplitterParams &bs, const Polarization &pol, size_t probe_dim = DEFAULT_PROBE_DIM);

/// Projects onto ">= 1 photon in arm" (absorbed) versus "arm empty" (passed).
AbsorberSplit apply_absorber(const SystemState &state, Arm arm);

/// Faraday mirror with the identity phase convention.
SystemState apply_mirror(const SystemState &state, Arm arm);

/// <s1|s2>. Throws std::invalid_argument when probe dimensions differ.
Complex overlap(const SystemState &s1, const SystemState &s2);

/// Linear-optics transform: a_k^dag -> sum_j m[k][j] a_j^dag on the four modes.
using ModeMatrix = std::array<std::array<Complex, NUM_MODES>, NUM_MODES>;
SystemState apply_mode_transform(const SystemState &state, const ModeMatrix &m);

/// Alice's output beamsplitter for both polarizations:
///   a^dag -> i sqrt(R) d1^dag + sqrt(T) d2^dag,  b^dag -> sqrt(T) d1^dag + i sqrt(R) d2^dag.
/// D1 lands in the arm-A slots, D2 in the arm-B slots.
ModeMatrix recombination_matrix(const BeamsplitterParams &bs);

/// Polarization basis change on one arm. For the diagonal basis the H slot
/// afterwards holds (H+V)/sqrt2 and the V slot (H-V)/sqrt2.
ModeMatrix diagonal_basis_matrix(Arm arm);

enum class DetectorClass : uint8_t { D1, D2, NoPhoton, MultiCount };

struct DetectorBranch {
    int d1_photons = 0;
    int d2_photons = 0;
    DetectorClass cls = DetectorClass::NoPhoton;
    double probability = 0;
    /// Post-measurement state (detector-mode labeling), renormalized.
    SystemState collapsed;
};

struct RecombineResult {
    /// One branch per distinct (d1_photons, d2_photons) pair with nonzero weight.
    std::vector<DetectorBranch> branches;

    double probability(DetectorClass cls) const;
    /// Normalized reduced probe density conditioned on cls. Throws if cls has zero weight.
    ProbeOperator probe_density(DetectorClass cls) const;
};

/// Recombines both arms at Alice's beamsplitter and counts photons at D1 and
/// D2 (number resolving). More than one detected photon is MultiCount.
RecombineResult recombine(const SystemState &state, const BeamsplitterParams &bs);

/// Photon-counting detection of everything in one arm. One branch per
/// observed (photons_h, photons_v); the detected photons are removed.
struct ArmDetection {
    int photons_h = 0;
    int photons_v = 0;
    double probability = 0;
    SystemState collapsed;
};
std::vector<ArmDetection> detect_arm(const SystemState &state, Arm arm);

/// Independent per-photon loss with probability `loss` in one arm. Branches
/// are keyed by the number of lost photons (photons_h, photons_v); the
/// lossless branch comes first.
std::vector<ArmDetection> apply_arm_loss(const SystemState &state, Arm arm, double loss);

/// Applies if_empty to the probe where the arm holds no photon and
/// if_occupied where it holds at least one.
SystemState apply_probe_conditional(
    const SystemState &state, Arm arm, const ProbeOperator &if_empty, const ProbeOperator &if_occupied);

/// Dimension of the (arm occupation with at most max_arm_photons photons) x probe block.
size_t arm_block_dim(int max_arm_photons, size_t probe_dim);
/// Position of (nh, nv, probe) in that block. Occupations are ordered
/// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
size_t arm_block_index(int nh, int nv, uint32_t probe, size_t probe_dim);

/// Applies a unitary on the (arm, probe) block; kets with more arm photons
/// than the block holds are left untouched. Throws std::domain_error if the
/// result leaves the Fock truncation.
SystemState apply_arm_probe_unitary(
    const SystemState &state, Arm arm, const Eigen::MatrixXcd &unitary, int max_arm_photons);

/// Probe density matrix with all optical modes traced out (unnormalized).
ProbeOperator reduced_probe_density(const SystemState &state);

}  // namespace scqkd

#endif
