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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seqlab/qcore.hpp"

namespace seqlab {

/// Index of the loss level absorbing decayed excitations.
inline constexpr int kLossLevel = 3;
inline constexpr int kQutritWithLoss = 4;

/// Density matrix over an explicit level set. For the qutrit the levels are
/// (|R1>, |R2>, |R3>, |loss>).
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  /// |psi><psi| embedded in the four-level space with an empty loss level.
  static DensityMatrix from_state(const QutritState& state);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return entries_; }
  Eigen::MatrixXcd& matrix() { return entries_; }
  double population(int level) const { return entries_(level, level).real(); }
  Complex coherence(int row, int col) const { return entries_(row, col); }
  double trace() const { return entries_.trace().real(); }
  double min_eigenvalue() const;
  double hermiticity_error() const;

  /// Throws NumericError when the trace, Hermiticity or positivity tolerance
  /// is exceeded.
  void check_physical(double trace_tol = 1e-8, double herm_tol = 1e-10,
                      double eig_tol = 1e-8) const;

 private:
  Eigen::MatrixXcd entries_;
};

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Decay |R_a> -> |loss> and pure dephasing of |R_a>, rates in 1/s.
struct DissipationParams {
  std::array<double, 3> gamma_decay{0.0, 0.0, 0.0};
  std::array<double, 3> gamma_deph{0.0, 0.0, 0.0};

  void validate() const;
  bool is_zero() const;
  double total_rate() const;
};

enum class IntegratorMethod { Rk4, Rk45 };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::Rk4;
  /// Largest allowed step; unset means each segment is split into 200 steps.
  std::optional<double> dt_max;
  /// Local error target for the adaptive method.
  double tolerance = 1e-10;
  /// Cap on (generator norm) x step. 0 disables the cap.
  double max_phase_per_step = 0.01;
  /// Trajectory spacing; unset emits segment boundaries only.
  std::optional<double> sample_spacing;

  void validate() const;
};

/// Embed a qutrit Hamiltonian into the four-level space (loss row and
/// column zero).
Eigen::Matrix4cd embed_hamiltonian(const Hamiltonian3& h);

/// -i[H, rho] + sum_k (L_k rho L_k^+ - {L_k^+ L_k, rho}/2) with
/// L_decay,a = sqrt(g) |loss><R_a| and L_deph,a = sqrt(g) |R_a><R_a|.
Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho, const Eigen::MatrixXcd& hamiltonian,
                              const DissipationParams& params);

struct TrajectorySample {
  double time = 0.0;
  DensityMatrix rho;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  DensityMatrix final_state;
  long steps = 0;
};

/// Integrates the master equation segment by segment under the piecewise
/// constant sequence Hamiltonian. Readout segments are rejected.
Trajectory evolve_master(const DensityMatrix& rho0, const PulseSequence& seq,
                         const DissipationParams& params, const IntegratorConfig& integrator = {});

/// CSV: time_s,P1,P2,P3,P_loss, then Re/Im of rho12, rho13, rho23.
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace seqlab
