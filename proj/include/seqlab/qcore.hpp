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

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "seqlab/units.hpp"

namespace seqlab {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix3c = Eigen::Matrix3cd;

/// Single-excitation Hamiltonian over (|R1>, |R2>, |R3>), entries in rad/s.
using Hamiltonian3 = Eigen::Matrix3cd;

enum class Field { Mu1, Mu2 };

/// Index of a collective Rydberg level in the qutrit basis.
enum Level : int { R1 = 0, R2 = 1, R3 = 2 };

/// Amplitudes on the three collective states |R1>, |R2>, |R3>.
struct QutritState {
  Eigen::Vector3cd amplitudes = Eigen::Vector3cd(1.0, 0.0, 0.0);

  static QutritState basis(Level level);
  double population(Level level) const { return std::norm(amplitudes[level]); }
  double norm() const { return amplitudes.norm(); }
};

/// One microwave pulse. Rabi frequency and detuning are angular (rad/s).
struct DriveSegment {
  Field field = Field::Mu1;
  double rabi = 0.0;
  double detuning = 0.0;
  double phase = 0.0;
  double duration = 0.0;

  friend bool operator==(const DriveSegment&, const DriveSegment&) = default;
};

struct WaitSegment {
  double duration = 0.0;
  friend bool operator==(const WaitSegment&, const WaitSegment&) = default;
};

inline constexpr double kDefaultRetrievalWindow = 200.0 * units::ns;

/// Retrieval of |R1> into time bin `bin` (1..3). The window only enters
/// sequence timing; the qutrit dynamics are handled by the read-out model.
struct ReadoutSegment {
  int bin = 1;
  double window = kDefaultRetrievalWindow;
  friend bool operator==(const ReadoutSegment&, const ReadoutSegment&) = default;
};

using Segment = std::variant<DriveSegment, WaitSegment, ReadoutSegment>;

double duration_of(const Segment& segment);

/// Diagonal detunings carried by a level whose drive is absent from a
/// segment. Zero by default, which makes waits the identity. Ramsey scans set
/// both to the mu1 detuning so the free-precession phase accumulates between
/// the pi/2 pulses.
struct FrameDetunings {
  double mu1 = 0.0;
  double mu2 = 0.0;
  friend bool operator==(const FrameDetunings&, const FrameDetunings&) = default;
};

inline constexpr double kSequenceDurationBound = 1.8 * units::us;

struct PulseSequence {
  std::vector<Segment> segments;
  std::string label;
  FrameDetunings frame;

  double total_duration() const;
  bool within_duration_bound(double bound = kSequenceDurationBound) const {
    return total_duration() < bound;
  }
  bool has_readout() const;
  /// Throws ValidationError on bad segments or read-out bins out of order.
  void validate() const;

  friend bool operator==(const PulseSequence&, const PulseSequence&) = default;
};

void validate(const DriveSegment& drive);

/// Rotating-frame Hamiltonian with the diagonal exactly as printed:
/// H(1,1) = -detuning_mu1, H(2,2) = -detuning_mu2 (level 2 is |R3>, which
/// carries only the mu2 detuning, not a cascade sum), H(1,0) =
/// (rabi_mu1/2) e^{i phase_mu1}, H(2,1) = (rabi_mu2/2) e^{i phase_mu2}.
/// An absent field contributes nothing.
Hamiltonian3 build_hamiltonian(const std::optional<DriveSegment>& mu1,
                               const std::optional<DriveSegment>& mu2);

/// Hamiltonian of one segment; a field that is not driven leaves its frame
/// detuning on the diagonal. Readout segments are rejected.
Hamiltonian3 segment_hamiltonian(const Segment& segment, const FrameDetunings& frame);

/// exp(-i H t) for H = [[0, (rabi/2) e^{i phase}], [(rabi/2) e^{-i phase}, -detuning]],
/// evaluated through the generalized Rabi solution.
Matrix2c two_level_propagator(double rabi, double detuning, double phase, double duration);

/// Exact 3x3 propagator of a drive or wait segment.
Matrix3c segment_propagator(const Segment& segment, const FrameDetunings& frame = {});

/// Product of segment propagators, first segment rightmost.
Matrix3c sequence_propagator(const PulseSequence& seq);

QutritState propagate_sequence(const QutritState& state, const PulseSequence& seq);

}  // namespace seqlab
