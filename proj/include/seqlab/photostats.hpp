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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqlab/dissipative.hpp"
#include "seqlab/qcore.hpp"
#include "seqlab/ramsey.hpp"

namespace seqlab {

using BinEfficiency = std::array<double, 3>;

/// Retrieved probability per time bin (efficiencies already applied).
struct TimeBinPopulations {
  std::array<double, 3> p{0.0, 0.0, 0.0};
  BinEfficiency eta{1.0, 1.0, 1.0};

  double sum() const { return p[0] + p[1] + p[2]; }
  void validate() const;
};

/// pi pulses used to map |R2> and |R3> back onto |R1> between bins.
struct ReadoutPulses {
  double mu1_pi_duration = 40.0 * units::ns;
  double mu2_pi_duration = 40.0 * units::ns;

  DriveSegment mu1_pi() const;
  DriveSegment mu2_pi() const;
};

/// Delays between the starts of consecutive retrieval windows.
struct ReadoutTiming {
  std::array<double, 2> inter_bin_delay{0.0, 0.0};

  /// window + mu1 pi, then window + mu2 pi + mu1 pi, with the default pulses.
  static ReadoutTiming canonical();
  /// Reads the delays off a sequence with read-out bins 1, 2 and 3.
  static ReadoutTiming from_sequence(const PulseSequence& seq);
};

/// Sequential time-bin read-out: retrieve |R1>; mu1 pi then retrieve; mu2 pi,
/// mu1 pi, then retrieve. Each retrieval removes the |R1> population and is
/// scaled by eta.
TimeBinPopulations readout_populations(const QutritState& state, const BinEfficiency& eta = {1.0, 1.0, 1.0},
                                       const ReadoutPulses& pulses = {});

/// Density-matrix read-out. With a dephasing rate g, each inter-bin delay d
/// dephases the stored spin wave: the qutrit block is scaled by exp(-g d)
/// and the lost weight moves to the loss level before the next mapping.
TimeBinPopulations readout_populations(const DensityMatrix& rho, const BinEfficiency& eta,
                                       std::optional<double> dephasing_rate,
                                       const ReadoutTiming& timing = ReadoutTiming::canonical(),
                                       const ReadoutPulses& pulses = {});

/// Runs every segment of `seq` on rho: drives and waits act unitarily (in
/// the sequence frame), each readout retrieves |R1> into its bin. With a
/// dephasing rate, every segment from the first readout on dephases the
/// stored spin wave over its duration. Bins never read out stay at 0.
TimeBinPopulations sequence_readout(const DensityMatrix& rho, const PulseSequence& seq,
                                    const BinEfficiency& eta = {1.0, 1.0, 1.0},
                                    std::optional<double> dephasing_rate = std::nullopt);

struct RabiPoint {
  double t_mu2 = 0.0;
  TimeBinPopulations populations;
};

/// mu1 pi/2 pulse of length t_half_pi, then a resonant mu2 pulse of length
/// t_mu2 (omitted when t_mu2 = 0).
PulseSequence rabi_preparation(double omega_mu2, double t_mu2, double t_half_pi = 20.0 * units::ns);

/// |R1> -> mu1 pi/2 (duration t_half_pi) -> mu2 pulse of length t -> read-out,
/// for each t in `t_mu2_values` (t = 0 skips the mu2 pulse).
std::vector<RabiPoint> rabi_scan(double omega_mu2, std::span<const double> t_mu2_values,
                                 double t_half_pi = 20.0 * units::ns);

enum Arm : int { ArmA = 0, ArmB = 1 };

/// Photon counts per time bin at the two HBT detector arms for one trial.
struct ShotRecord {
  std::array<std::array<std::uint32_t, 2>, 3> counts{};

  std::uint32_t count(int bin, Arm arm) const {
    return counts[static_cast<std::size_t>(bin - 1)][static_cast<std::size_t>(arm)];
  }
  friend bool operator==(const ShotRecord&, const ShotRecord&) = default;
};

/// Trials are generated in fixed-size blocks, each from its own generator
/// seeded by (seed, block index), so the output depends only on the seed.
inline constexpr std::uint64_t kShotBlockSize = 1u << 16;

/// Per trial: with probability p2 a two-photon event in bin 1, otherwise at
/// most one photon, landing in bin b with probability pops.p[b]. Photons
/// split 50/50 between the arms; dark counts add one count per bin and arm
/// independently with probability dark_rate.
std::vector<ShotRecord> sample_shots(const TimeBinPopulations& pops, std::uint64_t n_trials,
                                     std::uint64_t seed, double dark_rate, double p2);

/// Poissonian photon number per bin with the given means (coherent source).
std::vector<ShotRecord> sample_poisson_shots(const std::array<double, 3>& mean_photons,
                                             std::uint64_t n_trials, std::uint64_t seed,
                                             double dark_rate);

/// `trial,binA1,binB1,binA2,binB2,binA3,binB3` with a header row.
std::string shot_records_csv(std::span<const ShotRecord> records);
std::vector<ShotRecord> parse_shot_records_csv(std::string_view text);

struct G2Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_trials = 0;
  /// False when an arm saw no counts; value and std_error are NaN then.
  bool defined = true;
};

inline constexpr int kBootstrapResamples = 200;
inline constexpr std::uint64_t kBootstrapSeed = 0x6732'6232'7365'6564ULL;

/// Zero-delay HBT estimate <nA nB> / (<nA><nB>) for one bin, with a bootstrap
/// standard error over kBootstrapResamples resamples.
G2Estimate estimate_g2(std::span<const ShotRecord> records, int bin,
                       std::uint64_t bootstrap_seed = kBootstrapSeed);

struct FitResult {
  double offset = 0.0;
  double amplitude = 0.0;
  /// Angular frequency of the fringe in its abscissa; for a detuning scan
  /// this is t_total in seconds (fringe period 2 pi / t_total).
  double frequency = 0.0;
  double phase = 0.0;
  /// amplitude / offset clamped to [0, 1].
  double visibility = 0.0;
  double residual_rms = 0.0;
  int iterations = 0;
  bool converged = false;
  /// The data were flat; visibility is reported as 0.
  bool degenerate = false;
  /// The fitted frequency is more than 10% away from the hint.
  bool frequency_warning = false;
};

/// y = offset + amplitude cos(frequency x + phase), Gauss-Newton with
/// Levenberg damping started from the periodogram peak near the hint.
FitResult fit_sinusoid(std::span<const double> x, std::span<const double> y, double frequency_hint);

/// Fringe fit I(delta) = offset (1 + v cos(delta t_total + phase)).
FitResult fit_fringe(const FringeScan& scan, double t_total_hint);

}  // namespace seqlab
