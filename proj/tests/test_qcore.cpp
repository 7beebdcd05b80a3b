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
#include <limits>
#include <random>

#include "oracles.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/qcore.hpp"

using namespace seqlab;
using units::ns;
using units::pi;

namespace {

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

DriveSegment random_drive(std::mt19937_64& rng, Field field) {
  std::uniform_real_distribution<double> rabi(0.0, units::mhz_to_angular(30.0));
  std::uniform_real_distribution<double> det(-units::mhz_to_angular(20.0), units::mhz_to_angular(20.0));
  std::uniform_real_distribution<double> phase(-pi, pi);
  std::uniform_real_distribution<double> dur(1.0 * ns, 300.0 * ns);
  return {field, rabi(rng), det(rng), phase(rng), dur(rng)};
}

}  // namespace

TEST_CASE("hamiltonian matches the entry-by-entry construction") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_drive(rng, Field::Mu1);
    const auto b = random_drive(rng, Field::Mu2);
    const auto h = build_hamiltonian(a, b);
    const auto expected = oracle::hamiltonian(a.rabi, a.detuning, a.phase, b.rabi, b.detuning, b.phase);
    CHECK(max_abs_diff(h, expected) < 1e-6);  // entries are ~1e8 rad/s
    CHECK(max_abs_diff(h, h.adjoint()) == 0.0);
  }
}

TEST_CASE("level |R3> carries only the mu2 detuning") {
  const DriveSegment a{Field::Mu1, 1e7, 3e7, 0.0, 10 * ns};
  const DriveSegment b{Field::Mu2, 2e7, 5e7, 0.0, 10 * ns};
  const auto h = build_hamiltonian(a, b);
  CHECK(h(0, 0) == Complex(0.0));
  CHECK(h(1, 1) == Complex(-3e7));
  CHECK(h(2, 2) == Complex(-5e7));
  CHECK(h(0, 2) == Complex(0.0));
}

TEST_CASE("absent field contributes nothing") {
  const DriveSegment a{Field::Mu1, 1e7, 3e7, 0.2, 10 * ns};
  const auto h = build_hamiltonian(a, std::nullopt);
  CHECK(h(2, 2) == Complex(0.0));
  CHECK(h(2, 1) == Complex(0.0));
  CHECK(build_hamiltonian(std::nullopt, std::nullopt).isZero());
}

TEST_CASE("invalid drives are rejected") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(build_hamiltonian(DriveSegment{Field::Mu1, nan, 0, 0, 1 * ns}, std::nullopt), ValidationError);
  CHECK_THROWS_AS(build_hamiltonian(DriveSegment{Field::Mu1, 1e6, nan, 0, 1 * ns}, std::nullopt), ValidationError);
  CHECK_THROWS_AS(build_hamiltonian(DriveSegment{Field::Mu1, -1e6, 0, 0, 1 * ns}, std::nullopt), ValidationError);
  CHECK_THROWS_AS(build_hamiltonian(DriveSegment{Field::Mu1, 1e6, 0, 0, -1 * ns}, std::nullopt), ValidationError);
  CHECK_THROWS_AS(build_hamiltonian(DriveSegment{Field::Mu2, 1e6, 0, 0, 1 * ns}, std::nullopt), ValidationError);
  CHECK_THROWS_AS(build_hamiltonian(std::nullopt, DriveSegment{Field::Mu1, 1e6, 0, 0, 1 * ns}), ValidationError);
}

TEST_CASE("segment propagators agree with the matrix exponential") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> frame(-units::mhz_to_angular(15.0), units::mhz_to_angular(15.0));
  for (int trial = 0; trial < 60; ++trial) {
    const FrameDetunings f{frame(rng), frame(rng)};
    const Segment seg = trial % 3 == 0   ? Segment{random_drive(rng, Field::Mu1)}
                        : trial % 3 == 1 ? Segment{random_drive(rng, Field::Mu2)}
                                         : Segment{WaitSegment{123.4 * ns}};
    const auto h = segment_hamiltonian(seg, f);
    const auto expected = oracle::propagator(h, duration_of(seg));
    CHECK(max_abs_diff(segment_propagator(seg, f), expected) < 1e-12);
  }
}

TEST_CASE("two-level propagator: pi pulse swaps, 2pi pulse gives -1") {
  const double t = 40 * ns;
  const auto u_pi = two_level_propagator(pi / t, 0.0, 0.0, t);
  CHECK(std::abs(u_pi(0, 0)) < 1e-15);
  CHECK(std::abs(std::abs(u_pi(1, 0)) - 1.0) < 1e-15);
  const auto u_2pi = two_level_propagator(2.0 * pi / t, 0.0, 0.0, t);
  CHECK(max_abs_diff(u_2pi, -Matrix2c::Identity()) < 1e-15);
  const auto u_free = two_level_propagator(0.0, 1e7, 0.0, t);
  CHECK(std::abs(u_free(1, 1) - std::exp(Complex(0.0, 1e7 * t))) < 1e-15);
}

TEST_CASE("a wait with the default frame is the identity") {
  CHECK(max_abs_diff(segment_propagator(WaitSegment{500 * ns}), Matrix3c::Identity()) == 0.0);
}

TEST_CASE("propagation preserves the norm on random sequences") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    PulseSequence seq;
    std::uniform_int_distribution<int> n_seg(1, 8);
    const int n = n_seg(rng);
    for (int k = 0; k < n; ++k) {
      switch (rng() % 3) {
        case 0: seq.segments.emplace_back(random_drive(rng, Field::Mu1)); break;
        case 1: seq.segments.emplace_back(random_drive(rng, Field::Mu2)); break;
        default: seq.segments.emplace_back(WaitSegment{50 * ns}); break;
      }
    }
    seq.frame = {1e7, -2e7};
    const auto out = propagate_sequence(QutritState::basis(R1), seq);
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
    const auto u = sequence_propagator(seq);
    CHECK(max_abs_diff(u.adjoint() * u, Matrix3c::Identity()) < 1e-12);
  }
}

TEST_CASE("sequence product is ordered first-segment-rightmost") {
  const DriveSegment a{Field::Mu1, pi / (20 * ns), 0.0, 0.0, 10 * ns};
  const DriveSegment b{Field::Mu2, pi / (40 * ns), 0.0, 0.0, 40 * ns};
  PulseSequence seq{{a, b}, "", {}};
  const Matrix3c expected = segment_propagator(b) * segment_propagator(a);
  CHECK(max_abs_diff(sequence_propagator(seq), expected) < 1e-15);
  // pi/2 on mu1 then pi on mu2 moves half the population to |R3>.
  const auto s = propagate_sequence(QutritState::basis(R1), seq);
  CHECK(s.population(R1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.population(R3) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("sequence validation and duration bookkeeping") {
  PulseSequence seq;
  seq.segments = {DriveSegment{Field::Mu1, 1e7, 0, 0, 20 * ns}, WaitSegment{100 * ns}, ReadoutSegment{1},
                  ReadoutSegment{2, 0.0}};
  CHECK(seq.total_duration() == doctest::Approx(320 * ns));
  CHECK(seq.has_readout());
  CHECK(seq.within_duration_bound());
  CHECK_NOTHROW(seq.validate());
  CHECK_THROWS_AS(propagate_sequence(QutritState{}, seq), ValidationError);

  PulseSequence bad = seq;
  bad.segments.emplace_back(ReadoutSegment{1});
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  PulseSequence zero{{WaitSegment{0.0}}, "", {}};
  CHECK_THROWS_AS(zero.validate(), ValidationError);
  PulseSequence bin4{{ReadoutSegment{4}}, "", {}};
  CHECK_THROWS_AS(bin4.validate(), ValidationError);

  PulseSequence long_seq{{WaitSegment{2.0 * units::us}}, "", {}};
  CHECK_FALSE(long_seq.within_duration_bound());
}
