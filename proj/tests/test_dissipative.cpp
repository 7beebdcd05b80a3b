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

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "seqlab/dissipative.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/ramsey.hpp"

using namespace seqlab;
using units::ns;
using units::pi;

namespace {

std::vector<Eigen::MatrixXcd> oracle_jumps(const DissipationParams& p) {
  std::vector<Eigen::MatrixXcd> out;
  for (int a = 0; a < 3; ++a) {
    Eigen::MatrixXcd decay = Eigen::MatrixXcd::Zero(4, 4);
    decay(3, a) = std::sqrt(p.gamma_decay[static_cast<std::size_t>(a)]);
    out.push_back(decay);
    Eigen::MatrixXcd deph = Eigen::MatrixXcd::Zero(4, 4);
    deph(a, a) = std::sqrt(p.gamma_deph[static_cast<std::size_t>(a)]);
    out.push_back(deph);
  }
  return out;
}

// Master-equation solution by exponentiating the Liouvillian segment by segment.
Eigen::MatrixXcd oracle_evolve(Eigen::MatrixXcd rho, const PulseSequence& seq, const DissipationParams& p) {
  for (const auto& s : seq.segments) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 4);
    h.topLeftCorner(3, 3) = segment_hamiltonian(s, seq.frame);
    rho = oracle::evolve_liouvillian(rho, oracle::liouvillian(h, oracle_jumps(p)), duration_of(s));
  }
  return rho;
}

PulseSequence random_sequence(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rabi(0.0, units::mhz_to_angular(15.0));
  std::uniform_real_distribution<double> det(-units::mhz_to_angular(5.0), units::mhz_to_angular(5.0));
  std::uniform_real_distribution<double> ph(-pi, pi);
  std::uniform_real_distribution<double> dur(5 * ns, 120 * ns);
  PulseSequence seq;
  for (int k = 0; k < 4; ++k) {
    const Field f = k % 2 == 0 ? Field::Mu1 : Field::Mu2;
    seq.segments.emplace_back(DriveSegment{f, rabi(rng), det(rng), ph(rng), dur(rng)});
  }
  seq.segments.emplace_back(WaitSegment{dur(rng)});
  seq.frame = {det(rng), det(rng)};
  return seq;
}

DissipationParams random_rates(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rate(0.0, 2e6);
  DissipationParams p;
  for (int a = 0; a < 3; ++a) {
    p.gamma_decay[static_cast<std::size_t>(a)] = rate(rng);
    p.gamma_deph[static_cast<std::size_t>(a)] = rate(rng);
  }
  return p;
}

DensityMatrix random_mixed_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

}  // namespace

TEST_CASE("density matrix from a pure state") {
  QutritState s;
  s.amplitudes = Eigen::Vector3cd(Complex(0.6, 0.0), Complex(0.0, 0.8), 0.0);
  const auto rho = DensityMatrix::from_state(s);
  CHECK(rho.dim() == 4);
  CHECK(rho.trace() == doctest::Approx(1.0));
  CHECK(rho.population(0) == doctest::Approx(0.36));
  CHECK(rho.population(kLossLevel) == 0.0);
  CHECK(std::abs(rho.coherence(0, 1) - Complex(0.0, -0.48)) < 1e-15);
  CHECK_NOTHROW(rho.check_physical());
}

TEST_CASE("unphysical matrices fail the physicality check") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityMatrix(m).check_physical(), NumericError);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 4);
  h(0, 0) = 1.0;
  h(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix(h).check_physical(), NumericError);
}

TEST_CASE("the generator is traceless and preserves Hermiticity") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = random_mixed_state(rng);
    const auto seq = random_sequence(rng);
    const auto h = embed_hamiltonian(segment_hamiltonian(seq.segments[0], seq.frame));
    const auto d = lindblad_rhs(rho, h, random_rates(rng));
    CHECK(std::abs(d.trace()) < 1e-3);  // entries are ~1e7 per second
    CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("generator matches the Liouvillian superoperator") {
  std::mt19937_64 rng(22);
  const auto rho = random_mixed_state(rng);
  const auto seq = random_sequence(rng);
  const auto p = random_rates(rng);
  Eigen::MatrixXcd h = embed_hamiltonian(segment_hamiltonian(seq.segments[1], seq.frame));
  const auto d = lindblad_rhs(rho, h, p);
  const auto l = oracle::liouvillian(h, oracle_jumps(p));
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.matrix().data(), 16);
  Eigen::VectorXcd dv = l * v;
  const Eigen::MatrixXcd expected = Eigen::Map<Eigen::MatrixXcd>(dv.data(), 4, 4);
  CHECK((d - expected).cwiseAbs().maxCoeff() < 1e-6 * expected.cwiseAbs().maxCoeff() + 1e-9);
}

TEST_CASE("master equation agrees with Liouvillian exponentiation") {
  std::mt19937_64 rng(23);
  for (auto method : {IntegratorMethod::Rk4, IntegratorMethod::Rk45}) {
    for (int trial = 0; trial < 4; ++trial) {
      const auto seq = random_sequence(rng);
      const auto p = random_rates(rng);
      const auto rho0 = random_mixed_state(rng);
      IntegratorConfig cfg;
      cfg.method = method;
      const auto traj = evolve_master(rho0, seq, p, cfg);
      const DensityMatrix expected(oracle_evolve(rho0.matrix(), seq, p));
      CHECK(trace_distance(traj.final_state, expected) < 1e-8);
    }
  }
}

TEST_CASE("zero rates reduce to unitary evolution") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 5; ++trial) {
    const auto seq = random_sequence(rng);
    const auto psi = propagate_sequence(QutritState::basis(R1), seq);
    const auto traj = evolve_master(DensityMatrix::from_state(QutritState::basis(R1)), seq, {});
    CHECK(trace_distance(traj.final_state, DensityMatrix::from_state(psi)) < 1e-8);
  }
}

TEST_CASE("free decay and dephasing follow their exponentials") {
  const double g = 1.5e6;
  const double t = 400 * ns;
  QutritState s;
  s.amplitudes = Eigen::Vector3cd(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0);
  DissipationParams decay;
  decay.gamma_decay[1] = g;
  PulseSequence wait{{WaitSegment{t}}, "", {}};
  const auto a = evolve_master(DensityMatrix::from_state(s), wait, decay).final_state;
  CHECK(a.population(1) == doctest::Approx(0.5 * std::exp(-g * t)).epsilon(1e-10));
  CHECK(a.population(kLossLevel) == doctest::Approx(0.5 * (1.0 - std::exp(-g * t))).epsilon(1e-10));
  CHECK(std::abs(a.coherence(0, 1)) == doctest::Approx(0.5 * std::exp(-0.5 * g * t)).epsilon(1e-10));

  DissipationParams deph;
  deph.gamma_deph[0] = g;
  const auto b = evolve_master(DensityMatrix::from_state(s), wait, deph).final_state;
  CHECK(b.population(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(b.coherence(0, 1)) == doctest::Approx(0.5 * std::exp(-0.5 * g * t)).epsilon(1e-10));
}

TEST_CASE("every emitted sample is a physical state") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 5; ++trial) {
    IntegratorConfig cfg;
    cfg.sample_spacing = 7 * ns;
    const auto seq = random_sequence(rng);
    const auto traj = evolve_master(random_mixed_state(rng), seq, random_rates(rng), cfg);
    REQUIRE(traj.samples.size() > 10);
    CHECK(traj.samples.front().time == 0.0);
    CHECK(traj.samples.back().time == doctest::Approx(seq.total_duration()).epsilon(1e-12));
    for (const auto& s : traj.samples) {
      CHECK(std::abs(s.rho.trace() - 1.0) < 1e-10);
      CHECK(s.rho.hermiticity_error() < 1e-12);
      CHECK(s.rho.min_eigenvalue() > -1e-10);
    }
    for (std::size_t k = 1; k < traj.samples.size(); ++k) {
      CHECK(traj.samples[k].time > traj.samples[k - 1].time);
    }
  }
}

TEST_CASE("segment boundaries are sampled when no spacing is set") {
  PulseSequence seq{{WaitSegment{10 * ns}, DriveSegment{Field::Mu1, 1e7, 0, 0, 20 * ns}}, "", {}};
  const auto traj = evolve_master(DensityMatrix::from_state(QutritState{}), seq, {});
  REQUIRE(traj.samples.size() == 3);
  CHECK(traj.samples[1].time == doctest::Approx(10 * ns));
  CHECK(traj.samples[2].time == doctest::Approx(30 * ns));
  CHECK(traj.steps > 0);
  const auto csv = trajectory_csv(traj);
  CHECK(csv.rfind("time_s,P1,P2,P3,P_loss,re_rho12,im_rho12,re_rho13,im_rho13,re_rho23,im_rho23\n", 0) == 0);
}

TEST_CASE("invalid inputs are rejected") {
  PulseSequence seq{{WaitSegment{10 * ns}}, "", {}};
  const auto rho = DensityMatrix::from_state(QutritState{});
  DissipationParams negative;
  negative.gamma_decay[0] = -1.0;
  CHECK_THROWS_AS(evolve_master(rho, seq, negative), ValidationError);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(4, 4);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(evolve_master(DensityMatrix(bad), seq, {}), ValidationError);
  PulseSequence with_readout{{ReadoutSegment{1}}, "", {}};
  CHECK_THROWS_AS(evolve_master(rho, with_readout, {}), ValidationError);
  IntegratorConfig cfg;
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(evolve_master(rho, seq, {}, cfg), ValidationError);
}

TEST_CASE("adaptive step underflow is a numeric error") {
  PulseSequence seq{{DriveSegment{Field::Mu1, units::mhz_to_angular(10.0), 0, 0, 100 * ns}}, "", {}};
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::Rk45;
  cfg.tolerance = 1e-300;
  CHECK_THROWS_AS(evolve_master(DensityMatrix::from_state(QutritState{}), seq, {}, cfg), NumericError);
}

TEST_CASE("rate-equation limit of a single decay channel") {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(4, 4);
  rho(1, 1) = 1.0;
  DissipationParams p;
  p.gamma_decay[1] = 2.5;
  const auto d = lindblad_rhs(DensityMatrix(rho), Eigen::MatrixXcd::Zero(4, 4), p);
  CHECK(d(1, 1).real() == doctest::Approx(-2.5));
  CHECK(d(kLossLevel, kLossLevel).real() == doctest::Approx(2.5));
  CHECK(lindblad_rhs(DensityMatrix(rho), Eigen::MatrixXcd::Zero(4, 4), {}).isZero());
}

TEST_CASE("derivative is traceless to rounding at unit scale") {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rho = random_mixed_state(rng);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 4);
    for (int i = 0; i < 3; ++i) {
      h(i, i) = u(rng);
      for (int j = 0; j < i; ++j) {
        h(i, j) = Complex(u(rng), u(rng));
        h(j, i) = std::conj(h(i, j));
      }
    }
    DissipationParams p;
    for (int a = 0; a < 3; ++a) {
      p.gamma_decay[static_cast<std::size_t>(a)] = std::abs(u(rng));
      p.gamma_deph[static_cast<std::size_t>(a)] = std::abs(u(rng));
    }
    CHECK(std::abs(lindblad_rhs(rho, h, p).trace()) < 1e-14);
  }
}

TEST_CASE("zero rates: mu1 pi pulse moves |R1> to |R2>") {
  PulseSequence seq{{DriveSegment{Field::Mu1, pi / (40 * ns), 0, 0, 40 * ns}}, "", {}};
  const auto out = evolve_master(DensityMatrix::from_state(QutritState::basis(R1)), seq, {}).final_state;
  CHECK(trace_distance(out, DensityMatrix::from_state(QutritState::basis(R2))) < 1e-8);
}

TEST_CASE("R2 dephasing lowers the fitted fringe visibility monotonically") {
  RamseyScanConfig cfg;
  cfg.t_mu1 = 100 * ns;
  cfg.t_mu2 = 250 * ns;
  cfg.omega_mu2 = 2.0 * pi / cfg.t_mu2;
  cfg.backend = Backend::Lindblad;
  for (int k = 0; k < 21; ++k) cfg.deltas.push_back(units::mhz_to_angular(-4.0 + 0.4 * k));
  double prev = 2.0;
  for (double rate : {0.0, 2e5, 5e5, 1e6, 2e6}) {
    cfg.dissipation.gamma_deph = {0.0, rate, 0.0};
    const double v = fit_envelope_visibility(fringe_scan(cfg), cfg.t_mu1, cfg.t_total()).visibility;
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("halving the step converges on the canonical preparation") {
  RamseyScanConfig cfg;
  cfg.omega_mu2 = units::mhz_to_angular(12.5);
  const auto seq = ramsey_sequence(cfg, units::mhz_to_angular(1.0));
  DissipationParams p;
  p.gamma_decay = {1e5, 1e5, 1e5};
  p.gamma_deph = {0.0, 5e5, 5e5};
  const auto rho0 = DensityMatrix::from_state(QutritState::basis(R1));
  IntegratorConfig coarse;
  coarse.max_phase_per_step = 0.0;  // step set by dt_max alone
  coarse.dt_max = 0.1 * ns;
  IntegratorConfig fine = coarse;
  fine.dt_max = 0.05 * ns;
  const auto a = evolve_master(rho0, seq, p, coarse).final_state;
  const auto b = evolve_master(rho0, seq, p, fine).final_state;
  CHECK(trace_distance(a, b) < 1e-9);
}
