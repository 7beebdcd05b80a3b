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
#include "seqlab/errors.hpp"
#include "seqlab/pairwise.hpp"
#include "seqlab/ramsey.hpp"

using namespace seqlab;
using units::ns;
using units::pi;

namespace {

Hamiltonian3 random_hamiltonian(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Hamiltonian3 h;
  for (int i = 0; i < 3; ++i) {
    h(i, i) = u(rng);
    for (int j = 0; j < i; ++j) {
      h(i, j) = Complex(u(rng), u(rng));
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

RamseyScanConfig small_scan(double theta) {
  RamseyScanConfig c;
  c.t_mu1 = 10 * ns;
  c.t_mu2 = 250 * ns;
  c.omega_mu2 = theta / c.t_mu2;
  c.backend = Backend::Unitary;
  const double span = 4.0 * pi / c.t_total();
  for (int k = 0; k < 41; ++k) c.deltas.push_back(-span + 2.0 * span * k / 40.0);
  return c;
}

}  // namespace

TEST_CASE("symmetric lift equals the projected tensor construction") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = random_hamiltonian(rng);
    const Matrix6c lifted = lift_to_pair(h);
    const auto projected = oracle::pair_hamiltonian_projected(h, Eigen::Matrix3d::Zero());
    CHECK((lifted - projected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pair Hamiltonian with shifts equals the projected construction") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const DriveSegment a{Field::Mu1, 2.0, 0.3, 0.7, 1.0};
  const DriveSegment b{Field::Mu2, 1.5, -0.4, -1.1, 1.0};
  InteractionParams ip;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) ip.shifts(i, j) = ip.shifts(j, i) = u(rng);
  }
  const auto h = build_pair_hamiltonian(a, b, ip);
  const auto expected = oracle::pair_hamiltonian_projected(build_hamiltonian(a, b), ip.shifts);
  CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pair propagator is unitary and matches expm") {
  std::mt19937_64 rng(33);
  const Matrix6c h = lift_to_pair(random_hamiltonian(rng));
  const auto u = hermitian_propagator(h, 2.7);
  CHECK((u.adjoint() * u - Matrix6c::Identity()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((u - oracle::propagator(h, 2.7)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("without interactions the pair evolves as a product state") {
  const auto cfg = small_scan(2.0 * pi);
  for (double d : {0.0, 1.3e6, -2.2e7}) {
    const auto seq = ramsey_sequence(cfg, d);
    const auto single = propagate_sequence(QutritState::basis(R1), seq);
    const auto pair = propagate_pair(PairState::doubly(R1), seq, {});
    CHECK(std::abs(pair.norm() - 1.0) < 1e-12);
    for (auto level : {R1, R2, R3}) {
      CHECK(std::abs(pair.expected_occupation(level) - 2.0 * single.population(level)) < 1e-12);
    }
  }
}

TEST_CASE("mixture without interactions scales the single fringe") {
  const auto cfg = small_scan(2.0 * pi);
  const auto single = fringe_scan(cfg);
  const auto mixed = mixture_fringe_scan(cfg, InteractionParams::uniform(0.0, 0.2));
  REQUIRE(mixed.points.size() == single.points.size());
  for (std::size_t k = 0; k < single.points.size(); ++k) {
    CHECK(std::abs(mixed.points[k].intensity - 1.2 * single.points[k].intensity) < 1e-12);
  }
}

TEST_CASE("a uniform shift is a global phase") {
  const auto cfg = small_scan(2.0 * pi);
  const auto none = mixture_fringe_scan(cfg, InteractionParams::uniform(0.0, 0.3));
  const auto shifted = mixture_fringe_scan(cfg, InteractionParams::uniform(units::mhz_to_angular(3.0), 0.3));
  for (std::size_t k = 0; k < none.points.size(); ++k) {
    CHECK(std::abs(none.points[k].intensity - shifted.points[k].intensity) < 1e-10);
  }
}

TEST_CASE("p2 = 0 returns the single-excitation scan") {
  const auto cfg = small_scan(pi);
  const auto a = fringe_scan(cfg);
  const auto b = mixture_fringe_scan(cfg, InteractionParams::on_pair(R1, R1, 1e7, 0.0));
  for (std::size_t k = 0; k < a.points.size(); ++k) CHECK(a.points[k].intensity == b.points[k].intensity);
}

TEST_CASE("a shift on |R1R1> changes the fringe") {
  const auto cfg = small_scan(2.0 * pi);
  const auto none = mixture_fringe_scan(cfg, InteractionParams::on_pair(R1, R1, 0.0, 0.2));
  const auto shifted = mixture_fringe_scan(cfg, InteractionParams::on_pair(R1, R1, units::mhz_to_angular(0.3), 0.2));
  double max_diff = 0.0;
  for (std::size_t k = 0; k < none.points.size(); ++k) {
    max_diff = std::max(max_diff, std::abs(none.points[k].intensity - shifted.points[k].intensity));
  }
  CHECK(max_diff > 1e-3);
}

TEST_CASE("interaction parameter validation") {
  InteractionParams asym;
  asym.shifts(0, 1) = 1.0;
  CHECK_THROWS_AS(asym.validate(), ValidationError);
  CHECK_THROWS_AS(InteractionParams::uniform(0.0, 1.0).validate(), ValidationError);
  CHECK_THROWS_AS(InteractionParams::uniform(0.0, -0.1).validate(), ValidationError);
  CHECK(pair_index(2, 1) == pair_index(1, 2));
  CHECK(pair_index(0, 0) == 0);
  CHECK(pair_index(2, 2) == 5);
  CHECK(p2_from_g2(0.45, 0.2) == doctest::Approx(0.045));
}
