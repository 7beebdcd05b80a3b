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

#include "seqlab/ramsey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "seqlab/errors.hpp"

namespace seqlab {

namespace {

constexpr Complex kI{0.0, 1.0};
using units::pi;

void require_times(double t_mu1, double t_mu2, double dead_time) {
  if (!(t_mu1 > 0.0) || !std::isfinite(t_mu1)) throw ValidationError("t_mu1 must be positive");
  if (!(t_mu2 >= 0.0) || !std::isfinite(t_mu2)) throw ValidationError("t_mu2 must be >= 0");
  if (!(dead_time >= 0.0) || !std::isfinite(dead_time)) {
    throw ValidationError("dead time must be >= 0");
  }
}

// cos(pi y), exact at integer and half-integer y.
double cos_pi(double y) {
  const double r = std::fmod(std::abs(y), 2.0);
  if (r == 0.0) return 1.0;
  if (r == 1.0) return -1.0;
  if (r == 0.5 || r == 1.5) return 0.0;
  return std::cos(pi * r);
}

// cos(theta / 2) for the mu2 pulse area theta. An area within a few ulps of
// a multiple of pi is taken as that multiple, so k pi written as k * pi in
// double precision lands on the exact zeros and extrema.
double cos_half_area(double theta) {
  double q = theta / pi;
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(q))) {
    q = nearest;
  }
  return cos_pi(0.5 * q);
}

}  // namespace

RamseyTerms ramsey_terms(double delta1, double t_mu1, double t_mu2, double dead_time) {
  require_times(t_mu1, t_mu2, dead_time);
  if (!std::isfinite(delta1)) throw ValidationError("detuning must be finite");
  RamseyTerms r;
  const double x = delta1 * t_mu1;
  r.t_total = t_mu1 + t_mu2 + dead_time;
  r.phi = std::sqrt(x * x + 0.25 * pi * pi);
  const double half = 0.5 * r.phi;
  const Complex inner = std::cos(half) - kI * (x * std::sin(half) / r.phi);
  r.a = std::exp(kI * x) * inner * inner;
  const double s = std::sin(half);
  r.b = -std::exp(kI * (delta1 * r.t_total)) * (pi * pi * s * s / (4.0 * x * x + pi * pi));
  r.c = 2.0 * (r.a * std::conj(r.b)).real();
  return r;
}

double ramsey_intensity(double delta1, double t_mu1, double omega_mu2, double t_mu2, double i0,
                        double dead_time) {
  if (!(i0 > 0.0)) throw ValidationError("I0 must be positive");
  if (!std::isfinite(omega_mu2)) throw ValidationError("omega_mu2 must be finite");
  const auto r = ramsey_terms(delta1, t_mu1, t_mu2, dead_time);
  const double c = cos_half_area(omega_mu2 * t_mu2);
  return i0 * (std::norm(r.a) + std::norm(r.b) * c * c + r.c * c);
}

double ramsey_visibility(double omega_mu2, double t_mu2) {
  if (!(t_mu2 >= 0.0)) throw ValidationError("t_mu2 must be >= 0");
  const double c = cos_half_area(omega_mu2 * t_mu2);
  return std::abs(2.0 * c / (1.0 + c * c));
}

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Analytic: return "analytic";
    case Backend::Unitary: return "unitary";
    case Backend::Lindblad: return "lindblad";
  }
  return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "analytic") return Backend::Analytic;
  if (name == "unitary") return Backend::Unitary;
  if (name == "lindblad") return Backend::Lindblad;
  return std::nullopt;
}

void RamseyScanConfig::validate() const {
  require_times(t_mu1, t_mu2, dead_time);
  if (!(i0 > 0.0) || !std::isfinite(i0)) throw ValidationError("I0 must be positive");
  if (!(omega_mu2 >= 0.0) || !std::isfinite(omega_mu2)) {
    throw ValidationError("omega_mu2 must be finite and non-negative");
  }
  if (deltas.empty()) throw ValidationError("detuning grid is empty");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!std::isfinite(deltas[i])) throw ValidationError("detuning grid has non-finite values");
    if (i > 0 && !(deltas[i] > deltas[i - 1])) {
      throw ValidationError("detuning grid must be strictly increasing");
    }
  }
  dissipation.validate();
  integrator.validate();
}

std::vector<double> FringeScan::deltas() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.delta);
  return out;
}

std::vector<double> FringeScan::intensities() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.intensity);
  return out;
}

PulseSequence ramsey_sequence(const RamseyScanConfig& config, double delta) {
  const DriveSegment half_pi{Field::Mu1, pi / (2.0 * config.t_mu1), delta, 0.0, config.t_mu1};
  PulseSequence seq;
  seq.label = "ramsey";
  seq.frame = {delta, delta};
  seq.segments.emplace_back(half_pi);
  if (config.t_mu2 > 0.0) {
    seq.segments.emplace_back(DriveSegment{Field::Mu2, config.omega_mu2, delta, 0.0, config.t_mu2});
  }
  if (config.dead_time > 0.0) seq.segments.emplace_back(WaitSegment{config.dead_time});
  seq.segments.emplace_back(half_pi);
  return seq;
}

FringeScan fringe_scan(const RamseyScanConfig& config) {
  config.validate();
  FringeScan scan;
  scan.i0 = config.i0;
  scan.provenance = config.backend;
  scan.points.reserve(config.deltas.size());
  const auto rho0 = DensityMatrix::from_state(QutritState::basis(R1));
  for (const double delta : config.deltas) {
    double intensity = 0.0;
    switch (config.backend) {
      case Backend::Analytic:
        intensity = ramsey_intensity(delta, config.t_mu1, config.omega_mu2, config.t_mu2,
                                     config.i0, config.dead_time);
        break;
      case Backend::Unitary: {
        const auto out = propagate_sequence(QutritState::basis(R1), ramsey_sequence(config, delta));
        intensity = config.i0 * out.population(R1);
        break;
      }
      case Backend::Lindblad: {
        try {
          const auto traj = evolve_master(rho0, ramsey_sequence(config, delta),
                                          config.dissipation, config.integrator);
          intensity = config.i0 * traj.final_state.population(R1);
        } catch (const NumericError& e) {
          std::ostringstream msg;
          msg << "Lindblad scan failed at delta = " << delta << " rad/s: " << e.what();
          throw NumericError(msg.str());
        }
        break;
      }
    }
    scan.points.push_back({delta, intensity});
  }
  return scan;
}

EnvelopeFit fit_envelope_visibility(const FringeScan& scan, double t_mu1, double t_total) {
  if (scan.points.size() < 3) throw ValidationError("envelope fit needs at least 3 points");
  if (!(t_total >= t_mu1)) throw ValidationError("t_total must be at least t_mu1");
  const auto n = static_cast<Eigen::Index>(scan.points.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = scan.points[static_cast<std::size_t>(i)];
    const auto r = ramsey_terms(p.delta, t_mu1, t_total - t_mu1);
    design(i, 0) = std::norm(r.a);
    design(i, 1) = std::norm(r.b);
    design(i, 2) = r.c;
    y(i) = p.intensity;
  }
  const Eigen::Vector3d w = design.colPivHouseholderQr().solve(y);
  EnvelopeFit fit;
  fit.weight_a = w(0);
  fit.weight_b = w(1);
  fit.weight_c = w(2);
  const double denom = w(0) + w(1);
  fit.visibility = denom > 0.0 ? std::min(1.0, 2.0 * std::abs(w(2)) / denom) : 0.0;
  fit.residual_rms = std::sqrt((design * w - y).squaredNorm() / static_cast<double>(n));
  return fit;
}

}  // namespace seqlab
