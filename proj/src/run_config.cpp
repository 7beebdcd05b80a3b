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

#include "seqlab/run_config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "seqlab/errors.hpp"
#include "seqlab/table_io.hpp"

namespace seqlab {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct UnitFactor {
  std::string_view suffix;
  double factor;
};

double parse_with_units(std::string_view text, std::initializer_list<UnitFactor> table, std::string_view kind) {
  text = trim(text);
  for (const auto& [suffix, factor] : table) {
    if (text.size() > suffix.size() && text.substr(text.size() - suffix.size()) == suffix) {
      const double x = parse_double(trim(text.substr(0, text.size() - suffix.size())));
      if (!std::isfinite(x)) break;
      return x * factor;
    }
  }
  std::string units;
  for (const auto& u : table) units += (units.empty() ? "" : ", ") + std::string(u.suffix);
  throw ValidationError("expected a " + std::string(kind) + " with unit " + units + ", got '" +
                        std::string(text) + "'");
}

double parse_plain(std::string_view text) {
  const double x = parse_double(trim(text));
  if (!std::isfinite(x)) throw ValidationError("expected a finite number");
  return x;
}

std::uint64_t parse_u64(std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError("expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view text) {
  const auto v = parse_u64(text);
  if (v > 1'000'000'000u) throw ValidationError("integer is out of range");
  return static_cast<int>(v);
}

double parse_pi_multiple(std::string_view text) {
  return parse_with_units(text, {{"pi", units::pi}}, "multiple of pi");
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

std::map<std::string, Setter, std::less<>> make_setters() {
  std::map<std::string, Setter, std::less<>> s;
  s["backend"] = [](RunConfig& c, std::string_view v) {
    const auto b = parse_backend(trim(v));
    if (!b) throw ValidationError("backend must be analytic, unitary or lindblad");
    c.backend = *b;
  };
  s["format"] = [](RunConfig& c, std::string_view v) {
    const auto f = parse_format(trim(v));
    if (!f) throw ValidationError("format must be csv or json");
    c.format = *f;
  };
  s["seed"] = [](RunConfig& c, std::string_view v) { c.seed = parse_u64(v); };

  s["ramsey.t_mu1"] = [](RunConfig& c, std::string_view v) { c.ramsey.t_mu1 = parse_time(v); };
  s["ramsey.t_mu2"] = [](RunConfig& c, std::string_view v) { c.ramsey.t_mu2 = parse_time(v); };
  s["ramsey.omega_mu2"] = [](RunConfig& c, std::string_view v) { c.ramsey.omega_mu2 = parse_frequency(v); };
  s["ramsey.area_mu2"] = [](RunConfig& c, std::string_view v) { c.area_mu2 = parse_pi_multiple(v); };
  s["ramsey.dead_time"] = [](RunConfig& c, std::string_view v) { c.ramsey.dead_time = parse_time(v); };
  s["ramsey.i0"] = [](RunConfig& c, std::string_view v) { c.ramsey.i0 = parse_plain(v); };
  s["ramsey.delta_min"] = [](RunConfig& c, std::string_view v) { c.delta_min = parse_frequency(v); };
  s["ramsey.delta_max"] = [](RunConfig& c, std::string_view v) { c.delta_max = parse_frequency(v); };
  s["ramsey.points"] = [](RunConfig& c, std::string_view v) { c.points = parse_int(v); };

  s["rabi.omega_mu2"] = [](RunConfig& c, std::string_view v) { c.rabi.omega_mu2 = parse_frequency(v); };
  s["rabi.t_start"] = [](RunConfig& c, std::string_view v) { c.rabi.t_start = parse_time(v); };
  s["rabi.t_stop"] = [](RunConfig& c, std::string_view v) { c.rabi.t_stop = parse_time(v); };
  s["rabi.points"] = [](RunConfig& c, std::string_view v) { c.rabi.points = parse_int(v); };
  s["rabi.t_half_pi"] = [](RunConfig& c, std::string_view v) { c.rabi.t_half_pi = parse_time(v); };

  for (int k = 0; k < 3; ++k) {
    const auto n = std::to_string(k + 1);
    s["dissipation.gamma_decay_" + n] = [k](RunConfig& c, std::string_view v) {
      c.ramsey.dissipation.gamma_decay[static_cast<std::size_t>(k)] = parse_rate(v);
    };
    s["dissipation.gamma_deph_" + n] = [k](RunConfig& c, std::string_view v) {
      c.ramsey.dissipation.gamma_deph[static_cast<std::size_t>(k)] = parse_rate(v);
    };
    s["readout.eta_" + n] = [k](RunConfig& c, std::string_view v) {
      c.readout.eta[static_cast<std::size_t>(k)] = parse_plain(v);
    };
    s["shots.mean_photons_" + n] = [k](RunConfig& c, std::string_view v) {
      c.shots.mean_photons[static_cast<std::size_t>(k)] = parse_plain(v);
    };
    for (int j = k; j < 3; ++j) {
      s["interaction.v_" + n + std::to_string(j + 1)] = [k, j](RunConfig& c, std::string_view v) {
        const double shift = parse_frequency(v);
        c.interaction.shifts(k, j) = shift;
        c.interaction.shifts(j, k) = shift;
      };
    }
  }

  s["integrator.method"] = [](RunConfig& c, std::string_view v) {
    v = trim(v);
    if (v == "rk4") {
      c.ramsey.integrator.method = IntegratorMethod::Rk4;
    } else if (v == "rk45") {
      c.ramsey.integrator.method = IntegratorMethod::Rk45;
    } else {
      throw ValidationError("integrator.method must be rk4 or rk45");
    }
  };
  s["integrator.dt_max"] = [](RunConfig& c, std::string_view v) { c.ramsey.integrator.dt_max = parse_time(v); };
  s["integrator.tolerance"] = [](RunConfig& c, std::string_view v) {
    c.ramsey.integrator.tolerance = parse_plain(v);
  };
  s["integrator.max_phase_per_step"] = [](RunConfig& c, std::string_view v) {
    c.ramsey.integrator.max_phase_per_step = parse_plain(v);
  };

  s["interaction.v_int"] = [](RunConfig& c, std::string_view v) {
    c.interaction.shifts.setConstant(parse_frequency(v));
  };
  s["interaction.p2"] = [](RunConfig& c, std::string_view v) { c.interaction.p2 = parse_plain(v); };

  s["readout.dephasing_rate"] = [](RunConfig& c, std::string_view v) { c.readout.dephasing_rate = parse_rate(v); };

  s["shots.source"] = [](RunConfig& c, std::string_view v) {
    v = trim(v);
    if (v == "readout") {
      c.shots.source = ShotSource::Readout;
    } else if (v == "poisson") {
      c.shots.source = ShotSource::Poisson;
    } else {
      throw ValidationError("shots.source must be readout or poisson");
    }
  };
  s["shots.n_trials"] = [](RunConfig& c, std::string_view v) { c.shots.n_trials = parse_u64(v); };
  s["shots.dark"] = [](RunConfig& c, std::string_view v) { c.shots.dark = parse_plain(v); };
  s["shots.p2"] = [](RunConfig& c, std::string_view v) { c.shots.p2 = parse_plain(v); };
  s["shots.bin"] = [](RunConfig& c, std::string_view v) { c.shots.bin = parse_int(v); };
  return s;
}

}  // namespace

std::optional<OutputFormat> parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  return std::nullopt;
}

double parse_frequency(std::string_view text) {
  return parse_with_units(text, {{"MHz", units::mhz_to_angular(1.0)}, {"kHz", units::two_pi * 1e3}, {"Hz", units::two_pi}},
                          "frequency");
}

double parse_rate(std::string_view text) {
  return parse_with_units(text, {{"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0}}, "rate");
}

double parse_time(std::string_view text) {
  return parse_with_units(text, {{"ns", units::ns}, {"us", units::us}, {"s", 1.0}}, "time");
}

std::vector<double> RabiScanSettings::t_values() const {
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    t[static_cast<std::size_t>(k)] =
        points == 1 ? t_start : t_start + (t_stop - t_start) * k / static_cast<double>(points - 1);
  }
  if (points > 1) t.back() = t_stop;
  return t;
}

std::vector<double> RunConfig::delta_grid() const {
  std::vector<double> d(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    d[static_cast<std::size_t>(k)] =
        points == 1 ? delta_min : std::lerp(delta_min, delta_max, k / static_cast<double>(points - 1));
  }
  if (points > 1) d.back() = delta_max;
  return d;
}

RamseyScanConfig RunConfig::ramsey_scan() const {
  RamseyScanConfig out = ramsey;
  out.deltas = delta_grid();
  out.backend = backend;
  if (area_mu2) out.omega_mu2 = *area_mu2 / out.t_mu2;
  return out;
}

void RunConfig::validate() const {
  if (area_mu2 && !(*area_mu2 >= 0.0 && ramsey.t_mu2 > 0.0)) {
    throw ValidationError("ramsey.area_mu2 needs a non-negative area and a positive t_mu2");
  }
  if (points < 1) throw ValidationError("ramsey.points must be at least 1");
  if (points > 1 && !(delta_max > delta_min)) {
    throw ValidationError("ramsey.delta_max must exceed ramsey.delta_min");
  }
  ramsey_scan().validate();
  if (rabi.points < 1) throw ValidationError("rabi.points must be at least 1");
  if (!(rabi.t_start >= 0.0) || !(rabi.t_stop >= rabi.t_start)) {
    throw ValidationError("rabi scan needs 0 <= t_start <= t_stop");
  }
  if (!(rabi.t_half_pi > 0.0)) throw ValidationError("rabi.t_half_pi must be positive");
  if (!(rabi.omega_mu2 >= 0.0)) throw ValidationError("rabi.omega_mu2 must be non-negative");
  interaction.validate();
  for (double e : readout.eta) {
    if (!(e >= 0.0 && e <= 1.0)) throw ValidationError("readout.eta_* must lie in [0, 1]");
  }
  if (readout.dephasing_rate && !(*readout.dephasing_rate >= 0.0)) {
    throw ValidationError("readout.dephasing_rate must be non-negative");
  }
  if (shots.n_trials < 2) throw ValidationError("shots.n_trials must be at least 2");
  if (!(shots.dark >= 0.0 && shots.dark <= 1.0)) throw ValidationError("shots.dark must lie in [0, 1]");
  if (!(shots.p2 >= 0.0 && shots.p2 <= 1.0)) throw ValidationError("shots.p2 must lie in [0, 1]");
  if (shots.bin < 1 || shots.bin > 3) throw ValidationError("shots.bin must be 1, 2 or 3");
  for (double m : shots.mean_photons) {
    if (!(m >= 0.0)) throw ValidationError("shots.mean_photons_* must be non-negative");
  }
}

RunConfig parse_run_config(std::string_view text, std::string_view origin) {
  static const auto setters = make_setters();
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto where = std::string(origin) + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ValidationError(where + "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ValidationError(where + "unknown key '" + std::string(key) + "'");
    if (!seen.emplace(key).second) throw ValidationError(where + "duplicate key '" + std::string(key) + "'");
    try {
      it->second(config, value);
    } catch (const ValidationError& e) {
      throw ValidationError(where + std::string(key) + ": " + e.what());
    }
  }
  if (seen.contains("ramsey.area_mu2") && seen.contains("ramsey.omega_mu2")) {
    throw ValidationError(std::string(origin) + ": give ramsey.omega_mu2 or ramsey.area_mu2, not both");
  }
  try {
    config.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(origin) + ": " + e.what());
  }
  return config;
}

}  // namespace seqlab
