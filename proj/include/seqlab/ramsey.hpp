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

#include <optional>
#include <string_view>
#include <vector>

#include "seqlab/dissipative.hpp"
#include "seqlab/qcore.hpp"

namespace seqlab {

/// Interference terms of the closed-form Ramsey photon count.
struct RamseyTerms {
  Complex a;
  Complex b;
  double c = 0.0;    ///< 2 Re(a conj(b))
  double phi = 0.0;  ///< sqrt(delta^2 t_mu1^2 + pi^2/4)
  double t_total = 0.0;
};

/// t_total = t_mu1 + t_mu2 + dead_time.
RamseyTerms ramsey_terms(double delta1, double t_mu1, double t_mu2, double dead_time = 0.0);

/// I0 (|A|^2 + |B|^2 cos^2(theta/2) + C cos(theta/2)), theta = omega_mu2 t_mu2.
double ramsey_intensity(double delta1, double t_mu1, double omega_mu2, double t_mu2, double i0,
                        double dead_time = 0.0);

/// |2 cos(theta/2) / (1 + cos^2(theta/2))|, theta = omega_mu2 t_mu2.
double ramsey_visibility(double omega_mu2, double t_mu2);

enum class Backend { Analytic, Unitary, Lindblad };

std::string_view to_string(Backend backend);
std::optional<Backend> parse_backend(std::string_view name);

struct RamseyScanConfig {
  double t_mu1 = 100.0 * units::ns;
  /// mu1 detunings (rad/s); positive means the mu1 field is blue of the
  /// |R1> -> |R2> transition. Must be strictly increasing.
  std::vector<double> deltas;
  double omega_mu2 = 0.0;
  double t_mu2 = 250.0 * units::ns;
  Backend backend = Backend::Analytic;
  double i0 = 1.0;
  /// Extra free evolution between the mu2 pulse and the second pi/2 pulse.
  double dead_time = 0.0;
  DissipationParams dissipation;
  IntegratorConfig integrator;

  double t_total() const { return t_mu1 + t_mu2 + dead_time; }
  void validate() const;
};

struct FringePoint {
  double delta = 0.0;
  double intensity = 0.0;
};

struct FringeScan {
  std::vector<FringePoint> points;
  double i0 = 1.0;
  Backend provenance = Backend::Analytic;

  std::vector<double> deltas() const;
  std::vector<double> intensities() const;
};

/// pi/2 (mu1) - mu2 pulse - [wait] - pi/2 (mu1) at detuning `delta`, in the
/// frame where |R2> and |R3> both carry -delta through the whole sequence.
/// Both pi/2 pulses use rabi = pi / (2 t_mu1).
PulseSequence ramsey_sequence(const RamseyScanConfig& config, double delta);

/// Population of |R1> times I0 after the Ramsey sequence, for every delta,
/// in input order.
FringeScan fringe_scan(const RamseyScanConfig& config);

/// Result of projecting a scan onto the {|A|^2, |B|^2, C} basis.
struct EnvelopeFit {
  double weight_a = 0.0;
  double weight_b = 0.0;
  double weight_c = 0.0;
  double visibility = 0.0;
  double residual_rms = 0.0;
};

/// Linear least-squares fit I = wa |A|^2 + wb |B|^2 + wc C over the scan, with
/// the visibility read off the fitted fringe at the on-resonance envelope
/// (|A| = |B| = 1/2): V = 2|wc| / (wa + wb).
EnvelopeFit fit_envelope_visibility(const FringeScan& scan, double t_mu1, double t_total);

}  // namespace seqlab
