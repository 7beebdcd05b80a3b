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
#include <string>
#include <string_view>
#include <vector>

#include "seqlab/dissipative.hpp"
#include "seqlab/pairwise.hpp"
#include "seqlab/photostats.hpp"
#include "seqlab/ramsey.hpp"

namespace seqlab {

enum class OutputFormat { Csv, Json };

std::optional<OutputFormat> parse_format(std::string_view name);

struct RabiScanSettings {
  double omega_mu2 = units::mhz_to_angular(12.5);
  double t_start = 0.0;
  double t_stop = 160.0 * units::ns;
  int points = 161;
  double t_half_pi = 20.0 * units::ns;

  std::vector<double> t_values() const;
};

struct ReadoutSettings {
  BinEfficiency eta{1.0, 1.0, 1.0};
  std::optional<double> dephasing_rate;
};

enum class ShotSource { Readout, Poisson };

struct ShotSettings {
  ShotSource source = ShotSource::Readout;
  std::uint64_t n_trials = 100000;
  double dark = 0.0;
  double p2 = 0.0;
  int bin = 1;
  std::array<double, 3> mean_photons{0.1, 0.0, 0.0};
};

/// Everything a CLI run needs. Loaded from a flat `key = value` file with
/// dotted sections; keys not given keep these defaults.
struct RunConfig {
  Backend backend = Backend::Analytic;
  OutputFormat format = OutputFormat::Csv;
  std::uint64_t seed = 1;

  /// Ramsey scan; the detuning grid is delta_min..delta_max in `points`
  /// equal steps. A zero-width grid with one point is allowed.
  RamseyScanConfig ramsey;
  /// mu2 pulse area in rad; when set it fixes omega_mu2 = area / t_mu2.
  std::optional<double> area_mu2;
  double delta_min = -units::mhz_to_angular(10.0);
  double delta_max = units::mhz_to_angular(10.0);
  int points = 201;

  RabiScanSettings rabi;
  InteractionParams interaction;
  ReadoutSettings readout;
  ShotSettings shots;

  std::vector<double> delta_grid() const;
  /// Ramsey config with the grid, backend, rates and integrator filled in.
  RamseyScanConfig ramsey_scan() const;
  void validate() const;
};

/// Parses config text. Errors (unknown or duplicate keys, bad units, invalid
/// values) throw ValidationError naming `origin` and the line.
RunConfig parse_run_config(std::string_view text, std::string_view origin = "<config>");

/// Quantities with a unit suffix. Frequencies (Hz, kHz, MHz) come back as
/// angular frequencies, rates (same units) as 1/s, times accept s, us, ns.
double parse_frequency(std::string_view text);
double parse_rate(std::string_view text);
double parse_time(std::string_view text);

}  // namespace seqlab
