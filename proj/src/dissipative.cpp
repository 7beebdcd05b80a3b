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

#include "seqlab/dissipative.hpp"

#include <cmath>
#include <sstream>

#include "seqlab/errors.hpp"
#include "seqlab/table_io.hpp"

namespace seqlab {

namespace {

constexpr Complex kI{0.0, 1.0};
using Matrix4c = Eigen::Matrix4cd;

// Generator of one piecewise-constant stretch of the master equation.
struct LindbladGenerator {
  Matrix4c h;
  std::vector<Matrix4c> jumps;
  Matrix4c half_jump_sum = Matrix4c::Zero();
  double norm_bound = 0.0;

  LindbladGenerator(const Matrix4c& hamiltonian, const DissipationParams& params)
      : h(hamiltonian) {
    for (int a = 0; a < 3; ++a) {
      if (params.gamma_decay[a] > 0.0) {
        Matrix4c l = Matrix4c::Zero();
        l(kLossLevel, a) = std::sqrt(params.gamma_decay[a]);
        jumps.push_back(l);
      }
      if (params.gamma_deph[a] > 0.0) {
        Matrix4c l = Matrix4c::Zero();
        l(a, a) = std::sqrt(params.gamma_deph[a]);
        jumps.push_back(l);
      }
    }
    for (const auto& l : jumps) half_jump_sum += 0.5 * l.adjoint() * l;
    norm_bound = 2.0 * h.norm() + 2.0 * params.total_rate();
  }

  Matrix4c operator()(const Matrix4c& rho) const {
    Matrix4c out = -kI * (h * rho - rho * h);
    out.noalias() -= half_jump_sum * rho + rho * half_jump_sum;
    for (const auto& l : jumps) out.noalias() += l * rho * l.adjoint();
    return out;
  }
};

void check_trace(const Matrix4c& rho, double time) {
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "trace drifted to " << tr << " at t = " << time << " s";
    throw NumericError(msg.str());
  }
}

DensityMatrix to_density(const Matrix4c& m) { return DensityMatrix(Eigen::MatrixXcd(m)); }

class SegmentIntegrator {
 public:
  SegmentIntegrator(const IntegratorConfig& cfg, Trajectory& traj) : cfg_(cfg), traj_(traj) {
    if (cfg_.sample_spacing) next_sample_ = *cfg_.sample_spacing;
  }

  void run(Matrix4c& rho, const LindbladGenerator& gen, double t0, double duration) {
    if (cfg_.method == IntegratorMethod::Rk4) {
      run_rk4(rho, gen, t0, duration);
    } else {
      run_rk45(rho, gen, t0, duration);
    }
  }

  void emit(const Matrix4c& rho, double time) {
    auto dm = to_density(rho);
    try {
      dm.check_physical();
    } catch (const NumericError& e) {
      std::ostringstream msg;
      msg << "state left the physical set at t = " << time << " s: " << e.what();
      throw NumericError(msg.str());
    }
    traj_.samples.push_back({time, std::move(dm)});
  }

 private:
  void after_step(const Matrix4c& rho, double time) {
    ++traj_.steps;
    check_trace(rho, time);
    if (!cfg_.sample_spacing) return;
    if (time >= next_sample_ * (1.0 - 1e-12)) {
      emit(rho, time);
      while (next_sample_ <= time * (1.0 + 1e-12)) next_sample_ += *cfg_.sample_spacing;
    }
  }

  void run_rk4(Matrix4c& rho, const LindbladGenerator& gen, double t0, double duration) {
    long n = 200;
    if (cfg_.dt_max) n = std::max(1L, static_cast<long>(std::ceil(duration / *cfg_.dt_max)));
    if (cfg_.max_phase_per_step > 0.0) {
      const auto by_norm =
          static_cast<long>(std::ceil(gen.norm_bound * duration / cfg_.max_phase_per_step));
      n = std::max(n, by_norm);
    }
    const double h = duration / static_cast<double>(n);
    for (long i = 0; i < n; ++i) {
      const Matrix4c k1 = gen(rho);
      const Matrix4c k2 = gen(rho + 0.5 * h * k1);
      const Matrix4c k3 = gen(rho + 0.5 * h * k2);
      const Matrix4c k4 = gen(rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      after_step(rho, t0 + h * static_cast<double>(i + 1));
    }
  }

  // Dormand-Prince 5(4) with max-norm error control.
  void run_rk45(Matrix4c& rho, const LindbladGenerator& gen, double t0, double duration) {
    const double h_cap = cfg_.dt_max ? std::min(*cfg_.dt_max, duration) : duration;
    double h = std::min(h_cap, duration / 200.0);
    const double h_min = duration * 1e-12;
    double t = 0.0;
    while (t < duration) {
      if (t + h > duration) h = duration - t;
      const Matrix4c k1 = gen(rho);
      const Matrix4c k2 = gen(rho + h * (1.0 / 5.0) * k1);
      const Matrix4c k3 = gen(rho + h * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2));
      const Matrix4c k4 =
          gen(rho + h * ((44.0 / 45.0) * k1 - (56.0 / 15.0) * k2 + (32.0 / 9.0) * k3));
      const Matrix4c k5 = gen(rho + h * ((19372.0 / 6561.0) * k1 - (25360.0 / 2187.0) * k2 +
                                         (64448.0 / 6561.0) * k3 - (212.0 / 729.0) * k4));
      const Matrix4c k6 =
          gen(rho + h * ((9017.0 / 3168.0) * k1 - (355.0 / 33.0) * k2 + (46732.0 / 5247.0) * k3 +
                         (49.0 / 176.0) * k4 - (5103.0 / 18656.0) * k5));
      const Matrix4c next =
          rho + h * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 -
                     (2187.0 / 6784.0) * k5 + (11.0 / 84.0) * k6);
      const Matrix4c k7 = gen(next);
      const Matrix4c err =
          h * ((35.0 / 384.0 - 5179.0 / 57600.0) * k1 + (500.0 / 1113.0 - 7571.0 / 16695.0) * k3 +
               (125.0 / 192.0 - 393.0 / 640.0) * k4 + (-2187.0 / 6784.0 + 92097.0 / 339200.0) * k5 +
               (11.0 / 84.0 - 187.0 / 2100.0) * k6 - (1.0 / 40.0) * k7);
      const double err_norm = err.cwiseAbs().maxCoeff() / cfg_.tolerance;
      if (err_norm <= 1.0) {
        rho = next;
        t += h;
        after_step(rho, t0 + t);
      }
      const double factor =
          err_norm > 0.0 ? std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0) : 5.0;
      h = std::min(h * factor, h_cap);
      if (t < duration && h < h_min) {
        std::ostringstream msg;
        msg << "step-size underflow at t = " << t0 + t << " s (h = " << h << " s)";
        throw NumericError(msg.str());
      }
    }
  }

  const IntegratorConfig& cfg_;
  Trajectory& traj_;
  double next_sample_ = 0.0;
};

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw ValidationError("density matrix must be square and non-empty");
  }
}

DensityMatrix DensityMatrix::from_state(const QutritState& state) {
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi.head<3>() = state.amplitudes;
  return DensityMatrix(Eigen::MatrixXcd(psi * psi.adjoint()));
}

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double DensityMatrix::hermiticity_error() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

void DensityMatrix::check_physical(double trace_tol, double herm_tol, double eig_tol) const {
  std::ostringstream msg;
  if (std::abs(trace() - 1.0) > trace_tol) {
    msg << "trace " << trace() << " differs from 1";
  } else if (hermiticity_error() > herm_tol) {
    msg << "non-Hermitian by " << hermiticity_error();
  } else if (const double lmin = min_eigenvalue(); lmin < -eig_tol) {
    msg << "negative eigenvalue " << lmin;
  } else {
    return;
  }
  throw NumericError(msg.str());
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw ValidationError("trace distance of mismatched dimensions");
  const Eigen::MatrixXcd diff = a.matrix() - b.matrix();
  const Eigen::MatrixXcd herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

void DissipationParams::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (!(gamma_decay[a] >= 0.0) || !std::isfinite(gamma_decay[a]) || !(gamma_deph[a] >= 0.0) ||
        !std::isfinite(gamma_deph[a])) {
      throw ValidationError("dissipation rates must be finite and non-negative");
    }
  }
}

bool DissipationParams::is_zero() const { return total_rate() == 0.0; }

double DissipationParams::total_rate() const {
  double sum = 0.0;
  for (int a = 0; a < 3; ++a) sum += gamma_decay[a] + gamma_deph[a];
  return sum;
}

void IntegratorConfig::validate() const {
  if (dt_max && !(*dt_max > 0.0)) throw ValidationError("dt_max must be positive");
  if (!(tolerance > 0.0)) throw ValidationError("integrator tolerance must be positive");
  if (!(max_phase_per_step >= 0.0)) throw ValidationError("max_phase_per_step must be >= 0");
  if (sample_spacing && !(*sample_spacing > 0.0)) {
    throw ValidationError("sample spacing must be positive");
  }
}

Eigen::Matrix4cd embed_hamiltonian(const Hamiltonian3& h) {
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  out.topLeftCorner<3, 3>() = h;
  return out;
}

Eigen::MatrixXcd lindblad_rhs(const DensityMatrix& rho, const Eigen::MatrixXcd& hamiltonian,
                              const DissipationParams& params) {
  if (hamiltonian.rows() != rho.dim() || hamiltonian.cols() != rho.dim()) {
    throw ValidationError("Hamiltonian and density matrix dimensions differ");
  }
  if (rho.dim() != kQutritWithLoss) {
    throw ValidationError("master equation is defined on the four-level qutrit+loss space");
  }
  params.validate();
  const LindbladGenerator gen(Matrix4c(hamiltonian), params);
  return Eigen::MatrixXcd(gen(Matrix4c(rho.matrix())));
}

Trajectory evolve_master(const DensityMatrix& rho0, const PulseSequence& seq,
                         const DissipationParams& params, const IntegratorConfig& integrator) {
  if (rho0.dim() != kQutritWithLoss) {
    throw ValidationError("initial density matrix must be four-dimensional");
  }
  try {
    rho0.check_physical();
  } catch (const NumericError& e) {
    throw ValidationError(std::string("initial density matrix is not physical: ") + e.what());
  }
  params.validate();
  integrator.validate();
  seq.validate();
  if (seq.has_readout()) {
    throw ValidationError("master-equation evolution does not take read-out segments");
  }

  Trajectory traj{{}, rho0, 0};
  Matrix4c rho = rho0.matrix();
  SegmentIntegrator stepper(integrator, traj);
  stepper.emit(rho, 0.0);
  double t = 0.0;
  for (const auto& segment : seq.segments) {
    const LindbladGenerator gen(embed_hamiltonian(segment_hamiltonian(segment, seq.frame)), params);
    const double duration = duration_of(segment);
    stepper.run(rho, gen, t, duration);
    t += duration;
    if (!integrator.sample_spacing) stepper.emit(rho, t);
  }
  if (integrator.sample_spacing && traj.samples.back().time < t * (1.0 - 1e-12)) {
    stepper.emit(rho, t);
  }
  traj.final_state = to_density(rho);
  traj.final_state.check_physical();
  return traj;
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out =
      "time_s,P1,P2,P3,P_loss,re_rho12,im_rho12,re_rho13,im_rho13,re_rho23,im_rho23\n";
  for (const auto& s : trajectory.samples) {
    const auto& m = s.rho.matrix();
    const double fields[] = {s.time,
                             m(0, 0).real(),
                             m(1, 1).real(),
                             m(2, 2).real(),
                             m(3, 3).real(),
                             m(0, 1).real(),
                             m(0, 1).imag(),
                             m(0, 2).real(),
                             m(0, 2).imag(),
                             m(1, 2).real(),
                             m(1, 2).imag()};
    bool first = true;
    for (double f : fields) {
      if (!first) out += ',';
      out += format_double(f);
      first = false;
    }
    out += '\n';
  }
  return out;
}

}  // namespace seqlab
