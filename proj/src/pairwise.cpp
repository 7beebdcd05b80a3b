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

#include "seqlab/pairwise.hpp"

#include <cmath>

#include "seqlab/errors.hpp"

namespace seqlab {

namespace {

constexpr Complex kI{0.0, 1.0};

std::array<int, 3> occupations(int index) {
  std::array<int, 3> n{0, 0, 0};
  const auto [a, b] = kPairConfigurations[static_cast<std::size_t>(index)];
  ++n[static_cast<std::size_t>(a)];
  ++n[static_cast<std::size_t>(b)];
  return n;
}

int index_of(const std::array<int, 3>& n) {
  for (int k = 0; k < 6; ++k) {
    if (occupations(k) == n) return k;
  }
  throw ValidationError("occupation pattern outside the two-excitation manifold");
}

Matrix6c pair_segment_hamiltonian(const Segment& segment, const FrameDetunings& frame,
                                  const InteractionParams& interactions) {
  Matrix6c h = lift_to_pair(segment_hamiltonian(segment, frame));
  for (int k = 0; k < 6; ++k) {
    const auto [a, b] = kPairConfigurations[static_cast<std::size_t>(k)];
    h(k, k) += interactions.shift(a, b);
  }
  return h;
}

}  // namespace

int pair_index(int a, int b) {
  if (a > b) std::swap(a, b);
  for (int k = 0; k < 6; ++k) {
    if (kPairConfigurations[static_cast<std::size_t>(k)] == std::pair{a, b}) return k;
  }
  throw ValidationError("level index out of range");
}

PairState PairState::doubly(Level level) {
  PairState s;
  s.amplitudes = Vector6c::Unit(pair_index(level, level));
  return s;
}

double PairState::expected_occupation(Level level) const {
  double n = 0.0;
  for (int k = 0; k < 6; ++k) {
    n += std::norm(amplitudes(k)) * occupations(k)[static_cast<std::size_t>(level)];
  }
  return n;
}

InteractionParams InteractionParams::uniform(double v_int, double p2) {
  InteractionParams p;
  p.shifts.setConstant(v_int);
  p.p2 = p2;
  return p;
}

InteractionParams InteractionParams::on_pair(Level a, Level b, double v_int, double p2) {
  InteractionParams p;
  p.shifts(a, b) = v_int;
  p.shifts(b, a) = v_int;
  p.p2 = p2;
  return p;
}

void InteractionParams::validate() const {
  if (!shifts.allFinite()) throw ValidationError("interaction shifts must be finite");
  if ((shifts - shifts.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw ValidationError("interaction shift matrix must be symmetric");
  }
  if (!(p2 >= 0.0 && p2 < 1.0)) throw ValidationError("p2 must lie in [0, 1)");
}

Matrix6c lift_to_pair(const Hamiltonian3& h) {
  Matrix6c out = Matrix6c::Zero();
  for (int k = 0; k < 6; ++k) {
    const auto n = occupations(k);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (h(i, j) == Complex{0.0, 0.0} || n[static_cast<std::size_t>(j)] == 0) continue;
        if (i == j) {
          out(k, k) += h(i, i) * static_cast<double>(n[static_cast<std::size_t>(i)]);
          continue;
        }
        auto m = n;
        const double amp = std::sqrt(static_cast<double>(m[static_cast<std::size_t>(j)]--) *
                                     static_cast<double>(++m[static_cast<std::size_t>(i)]));
        out(index_of(m), k) += h(i, j) * amp;
      }
    }
  }
  return out;
}

Matrix6c build_pair_hamiltonian(const std::optional<DriveSegment>& mu1,
                                const std::optional<DriveSegment>& mu2,
                                const InteractionParams& interactions) {
  interactions.validate();
  Matrix6c h = lift_to_pair(build_hamiltonian(mu1, mu2));
  for (int k = 0; k < 6; ++k) {
    const auto [a, b] = kPairConfigurations[static_cast<std::size_t>(k)];
    h(k, k) += interactions.shift(a, b);
  }
  return h;
}

Matrix6c hermitian_propagator(const Matrix6c& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix6c> solver(h);
  if (solver.info() != Eigen::Success) throw NumericError("pair Hamiltonian diagonalization failed");
  Vector6c phases;
  for (int k = 0; k < 6; ++k) phases(k) = std::exp(-kI * (solver.eigenvalues()(k) * t));
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

PairState propagate_pair(const PairState& state, const PulseSequence& seq,
                         const InteractionParams& interactions) {
  seq.validate();
  interactions.validate();
  PairState out = state;
  for (const auto& segment : seq.segments) {
    const Matrix6c h = pair_segment_hamiltonian(segment, seq.frame, interactions);
    out.amplitudes = hermitian_propagator(h, duration_of(segment)) * out.amplitudes;
  }
  return out;
}

FringeScan mixture_fringe_scan(const RamseyScanConfig& config,
                               const InteractionParams& interactions) {
  interactions.validate();
  FringeScan scan = fringe_scan(config);
  if (interactions.p2 == 0.0) return scan;
  const auto start = PairState::doubly(R1);
  for (auto& point : scan.points) {
    const auto pair = propagate_pair(start, ramsey_sequence(config, point.delta), interactions);
    const double doubles = config.i0 * pair.expected_occupation(R1);
    point.intensity = (1.0 - interactions.p2) * point.intensity + interactions.p2 * doubles;
  }
  return scan;
}

double p2_from_g2(double g2, double mean_photon_number) {
  if (!(g2 >= 0.0) || !(mean_photon_number >= 0.0)) {
    throw ValidationError("g2 and mean photon number must be non-negative");
  }
  return 0.5 * g2 * mean_photon_number;
}

}  // namespace seqlab
