// Copyright 2026 The seqlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <utility>

#include <Eigen/Dense>

#include "seqlab/qcore.hpp"
#include "seqlab/ramsey.hpp"

namespace seqlab {

using Matrix6c = Eigen::Matrix<Complex, 6, 6>;
using Vector6c = Eigen::Matrix<Complex, 6, 1>;

/// Symmetric two-excitation configurations, in basis order:
/// |R1R1>, |R1R2>, |R1R3>, |R2R2>, |R2R3>, |R3R3>.
inline constexpr std::array<std::pair<int, int>, 6> kPairConfigurations{
    {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

/// Index of configuration {a, b} in kPairConfigurations (order-insensitive).
int pair_index(int a, int b);

struct PairState {
  Vector6c amplitudes = Vector6c::Unit(0);

  /// Both excitations in `level`.
  static PairState doubly(Level level);
  double norm() const { return amplitudes.norm(); }
  /// Expected number of excitations found in `level`.
  double expected_occupation(Level level) const;
};

/// Configuration-diagonal interaction shifts (rad/s) and the per-shot double
/// excitation probability.
struct InteractionParams {
  Eigen::Matrix3d shifts = Eigen::Matrix3d::Zero();
  double p2 = 0.0;

  /// The same shift on all six configurations. This is a global phase on the
  /// pair manifold and leaves fringes unchanged.
  static InteractionParams uniform(double v_int, double p2);
  /// A shift on configuration {a, b} only.
  static InteractionParams on_pair(Level a, Level b, double v_int, double p2);

  double shift(int a, int b) const { return shifts(a, b); }
  void validate() const;
};

/// Second-quantized lift sum_ij H_ij a_i^+ a_j of a single-excitation
/// Hamiltonian onto the symmetric two-excitation subspace.
Matrix6c lift_to_pair(const Hamiltonian3& h);

/// lift_to_pair(build_hamiltonian(mu1, mu2)) plus the diagonal shifts.
Matrix6c build_pair_hamiltonian(const std::optional<DriveSegment>& mu1,
                                const std::optional<DriveSegment>& mu2,
                                const InteractionParams& interactions);

/// exp(-i h t) for Hermitian h via its eigendecomposition.
Matrix6c hermitian_propagator(const Matrix6c& h, double t);

PairState propagate_pair(const PairState& state, const PulseSequence& seq,
                         const InteractionParams& interactions);

/// (1 - p2) I_single + p2 I_double, where I_double is I0 times the expected
/// number of |R1> excitations after the Ramsey sequence starting from
/// |R1R1>. The single-excitation part follows config.backend; the pair part
/// is always propagated unitarily.
FringeScan mixture_fringe_scan(const RamseyScanConfig& config, const InteractionParams& interactions);

/// Low-mean-photon-number estimate p2 ~ g2 <n> / 2. A convenience for
/// choosing inputs, not a derived relation.
double p2_from_g2(double g2, double mean_photon_number);

}  // namespace seqlab
