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

#include "seqlab/qcore.hpp"

#include <cmath>
#include <string>

#include "seqlab/errors.hpp"

namespace seqlab {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw ValidationError(std::string(what) + " must be finite");
  }
}

// sin(x)/x with the removable singularity filled in.
double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

void check_field(const std::optional<DriveSegment>& drive, Field expected) {
  if (!drive) return;
  if (drive->field != expected) {
    throw ValidationError("drive segment passed for the wrong field");
  }
  require_finite(drive->rabi, "rabi frequency");
  require_finite(drive->detuning, "detuning");
  require_finite(drive->phase, "phase");
  require_finite(drive->duration, "duration");
  if (drive->rabi < 0.0) throw ValidationError("rabi frequency must be non-negative");
  if (drive->duration < 0.0) throw ValidationError("duration must be non-negative");
}

}  // namespace

QutritState QutritState::basis(Level level) {
  QutritState s;
  s.amplitudes.setZero();
  s.amplitudes[level] = 1.0;
  return s;
}

double duration_of(const Segment& segment) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ReadoutSegment>) {
          return s.window;
        } else {
          return s.duration;
        }
      },
      segment);
}

double PulseSequence::total_duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += duration_of(s);
  return total;
}

bool PulseSequence::has_readout() const {
  for (const auto& s : segments) {
    if (std::holds_alternative<ReadoutSegment>(s)) return true;
  }
  return false;
}

void validate(const DriveSegment& drive) {
  require_finite(drive.rabi, "rabi frequency");
  require_finite(drive.detuning, "detuning");
  require_finite(drive.phase, "phase");
  require_finite(drive.duration, "duration");
  if (drive.rabi < 0.0) throw ValidationError("rabi frequency must be non-negative");
  if (drive.duration <= 0.0) throw ValidationError("drive duration must be positive");
}

void PulseSequence::validate() const {
  require_finite(frame.mu1, "frame detuning");
  require_finite(frame.mu2, "frame detuning");
  int last_bin = 0;
  for (const auto& s : segments) {
    if (const auto* d = std::get_if<DriveSegment>(&s)) {
      seqlab::validate(*d);
    } else if (const auto* w = std::get_if<WaitSegment>(&s)) {
      require_finite(w->duration, "wait duration");
      if (w->duration <= 0.0) throw ValidationError("wait duration must be positive");
    } else {
      const auto& r = std::get<ReadoutSegment>(s);
      if (r.bin < 1 || r.bin > 3) throw ValidationError("read-out bin must be 1, 2 or 3");
      if (r.bin <= last_bin) {
        throw ValidationError("read-out bins must appear in strictly increasing order");
      }
      require_finite(r.window, "read-out window");
      if (r.window < 0.0) throw ValidationError("read-out window must be non-negative");
      last_bin = r.bin;
    }
  }
}

Hamiltonian3 build_hamiltonian(const std::optional<DriveSegment>& mu1,
                               const std::optional<DriveSegment>& mu2) {
  check_field(mu1, Field::Mu1);
  check_field(mu2, Field::Mu2);
  Hamiltonian3 h = Hamiltonian3::Zero();
  if (mu1) {
    h(1, 1) = -mu1->detuning;
    h(1, 0) = 0.5 * mu1->rabi * std::exp(kI * mu1->phase);
    h(0, 1) = std::conj(h(1, 0));
  }
  if (mu2) {
    h(2, 2) = -mu2->detuning;
    h(2, 1) = 0.5 * mu2->rabi * std::exp(kI * mu2->phase);
    h(1, 2) = std::conj(h(2, 1));
  }
  return h;
}

Hamiltonian3 segment_hamiltonian(const Segment& segment, const FrameDetunings& frame) {
  Hamiltonian3 h = Hamiltonian3::Zero();
  if (const auto* d = std::get_if<DriveSegment>(&segment)) {
    if (d->field == Field::Mu1) {
      h = build_hamiltonian(*d, std::nullopt);
      h(2, 2) = -frame.mu2;
    } else {
      h = build_hamiltonian(std::nullopt, *d);
      h(1, 1) = -frame.mu1;
    }
  } else if (std::holds_alternative<WaitSegment>(segment)) {
    h(1, 1) = -frame.mu1;
    h(2, 2) = -frame.mu2;
  } else {
    throw ValidationError("read-out segments have no Hamiltonian");
  }
  return h;
}

Matrix2c two_level_propagator(double rabi, double detuning, double phase, double duration) {
  require_finite(rabi, "rabi frequency");
  require_finite(detuning, "detuning");
  require_finite(phase, "phase");
  require_finite(duration, "duration");
  if (rabi < 0.0) throw ValidationError("rabi frequency must be non-negative");
  if (duration <= 0.0) throw ValidationError("propagation time must be positive");

  // H = -detuning/2 * I + K with K traceless and K^2 = W^2 I.
  const double w = 0.5 * std::hypot(rabi, detuning);
  const double wt = w * duration;
  const Complex coupling = 0.5 * rabi * std::exp(kI * phase);
  Matrix2c k;
  k << 0.5 * detuning, coupling, std::conj(coupling), -0.5 * detuning;

  const Complex global = std::exp(kI * (0.5 * detuning * duration));
  Matrix2c u = std::cos(wt) * Matrix2c::Identity() - kI * (duration * sinc(wt)) * k;
  return global * u;
}

Matrix3c segment_propagator(const Segment& segment, const FrameDetunings& frame) {
  Matrix3c u = Matrix3c::Identity();
  if (const auto* d = std::get_if<DriveSegment>(&segment)) {
    validate(*d);
    const double t = d->duration;
    if (d->field == Field::Mu1) {
      // The embedded block has the coupling phase conjugated relative to
      // two_level_propagator's upper-right entry.
      u.topLeftCorner<2, 2>() = two_level_propagator(d->rabi, d->detuning, -d->phase, t);
      u(2, 2) = std::exp(kI * (frame.mu2 * t));
    } else {
      u.bottomRightCorner<2, 2>() = std::exp(kI * (frame.mu1 * t)) *
                                    two_level_propagator(d->rabi, d->detuning - frame.mu1,
                                                         -d->phase, t);
    }
  } else if (const auto* w = std::get_if<WaitSegment>(&segment)) {
    if (!(w->duration > 0.0)) throw ValidationError("wait duration must be positive");
    u(1, 1) = std::exp(kI * (frame.mu1 * w->duration));
    u(2, 2) = std::exp(kI * (frame.mu2 * w->duration));
  } else {
    throw ValidationError("read-out segments cannot be propagated unitarily");
  }
  return u;
}

Matrix3c sequence_propagator(const PulseSequence& seq) {
  Matrix3c u = Matrix3c::Identity();
  for (const auto& s : seq.segments) u = segment_propagator(s, seq.frame) * u;
  return u;
}

QutritState propagate_sequence(const QutritState& state, const PulseSequence& seq) {
  seq.validate();
  QutritState out = state;
  for (const auto& s : seq.segments) {
    out.amplitudes = segment_propagator(s, seq.frame) * out.amplitudes;
  }
  return out;
}

}  // namespace seqlab
