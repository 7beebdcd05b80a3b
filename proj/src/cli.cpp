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

#include "seqlab/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqlab/errors.hpp"
#include "seqlab/pairwise.hpp"
#include "seqlab/photostats.hpp"
#include "seqlab/ramsey.hpp"
#include "seqlab/run_config.hpp"
#include "seqlab/sequence_dsl.hpp"
#include "seqlab/table_io.hpp"

namespace seqlab {

namespace {

struct Options {
  std::string config;
  std::string backend;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::string seq;
  std::string in;
  std::string records;
  std::string t_total;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "run configuration file");
  cmd->add_option("--backend", o.backend, "analytic | unitary | lindblad");
  cmd->add_option("--out", o.out, "output file (default: standard output)");
  cmd->add_option("--format", o.format, "csv | json");
  cmd->add_option("--seed", o.seed, "random seed");
}

RunConfig load_config(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : parse_run_config(read_file(o.config), o.config);
  if (!o.backend.empty()) {
    const auto b = parse_backend(o.backend);
    if (!b) throw ValidationError("--backend must be analytic, unitary or lindblad");
    c.backend = *b;
  }
  if (!o.format.empty()) {
    const auto f = parse_format(o.format);
    if (!f) throw ValidationError("--format must be csv or json");
    c.format = *f;
  }
  if (o.seed) c.seed = *o.seed;
  c.validate();
  return c;
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_file_atomic(o.out, text);
  }
}

void emit_table(const Options& o, const RunConfig& c, std::ostream& out, const Table& t) {
  emit(o, out, c.format == OutputFormat::Json ? t.to_json() : t.to_csv());
}

std::string ns_string(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g ns", seconds / units::ns);
  return buf;
}

PulseSequence load_sequence(const Options& o, std::ostream& err) {
  PulseSequence seq = o.seq.empty() ? canonical_ramsey_sequence()
                                    : parse_sequence(SequenceSource{read_file(o.seq), o.seq});
  const double total = seq.total_duration();
  err << "sequence " << seq.label << ": " << seq.segments.size() << " segments, total " << ns_string(total)
      << (seq.within_duration_bound() ? " < " : " >= ") << ns_string(kSequenceDurationBound) << " bound\n";
  return seq;
}

// State just before the first readout, from |R1>.
DensityMatrix prepare(const RunConfig& c, const PulseSequence& prep) {
  if (prep.segments.empty()) return DensityMatrix::from_state(QutritState::basis(R1));
  if (c.backend == Backend::Lindblad) {
    return evolve_master(DensityMatrix::from_state(QutritState::basis(R1)), prep, c.ramsey.dissipation,
                         c.ramsey.integrator)
        .final_state;
  }
  return DensityMatrix::from_state(propagate_sequence(QutritState::basis(R1), prep));
}

TimeBinPopulations run_readout(const RunConfig& c, const PulseSequence& seq) {
  const auto first = std::find_if(seq.segments.begin(), seq.segments.end(),
                                  [](const Segment& s) { return std::holds_alternative<ReadoutSegment>(s); });
  if (first == seq.segments.end()) throw ValidationError("sequence has no readout statement");
  PulseSequence prep{{seq.segments.begin(), first}, seq.label, seq.frame};
  PulseSequence stages{{first, seq.segments.end()}, seq.label, seq.frame};
  return sequence_readout(prepare(c, prep), stages, c.readout.eta, c.readout.dephasing_rate);
}

int ramsey_scan_cmd(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = load_config(o);
  const auto config = c.ramsey_scan();
  err << "ramsey-scan: " << config.deltas.size() << " detunings, backend " << to_string(config.backend)
      << ", t_total " << ns_string(config.t_total()) << "\n";
  const auto scan = mixture_fringe_scan(config, c.interaction);
  Table t{{"delta_rad_s", "intensity"}, {}};
  for (const auto& p : scan.points) t.rows.push_back({p.delta, p.intensity});
  emit_table(o, c, out, t);
  return kExitOk;
}

int rabi_scan_cmd(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = load_config(o);
  err << "rabi-scan: omega_mu2 = 2pi x " << format_double(units::angular_to_mhz(c.rabi.omega_mu2))
      << " MHz, " << c.rabi.points << " points, backend " << to_string(c.backend) << "\n";
  Table t{{"t_mu2_s", "P1", "P2", "P3"}, {}};
  for (const double tm : c.rabi.t_values()) {
    const auto prep = rabi_preparation(c.rabi.omega_mu2, tm, c.rabi.t_half_pi);
    const auto pops =
        readout_populations(prepare(c, prep), c.readout.eta, c.readout.dephasing_rate, ReadoutTiming::canonical());
    t.rows.push_back({tm, pops.p[0], pops.p[1], pops.p[2]});
  }
  emit_table(o, c, out, t);
  return kExitOk;
}

int readout_cmd(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = load_config(o);
  const auto pops = run_readout(c, load_sequence(o, err));
  Table t{{"bin", "probability"}, {}};
  for (int b = 0; b < 3; ++b) t.rows.push_back({static_cast<double>(b + 1), pops.p[static_cast<std::size_t>(b)]});
  emit_table(o, c, out, t);
  return kExitOk;
}

int g2_cmd(const Options& o, std::ostream& out, std::ostream& err) {
  const auto c = load_config(o);
  std::vector<ShotRecord> records;
  if (!o.in.empty()) {
    records = parse_shot_records_csv(read_file(o.in));
    err << "g2: " << records.size() << " records from " << o.in << "\n";
  } else if (c.shots.source == ShotSource::Poisson) {
    records = sample_poisson_shots(c.shots.mean_photons, c.shots.n_trials, c.seed, c.shots.dark);
    err << "g2: " << records.size() << " Poissonian trials, seed " << c.seed << "\n";
  } else {
    const auto pops = run_readout(c, load_sequence(o, err));
    records = sample_shots(pops, c.shots.n_trials, c.seed, c.shots.dark, c.shots.p2);
    err << "g2: " << records.size() << " trials, p2 " << format_double(c.shots.p2) << ", seed " << c.seed << "\n";
  }
  if (!o.records.empty()) write_file_atomic(o.records, shot_records_csv(records));
  const auto est = estimate_g2(records, c.shots.bin);
  if (!est.defined) err << "g2: undefined, an arm recorded no counts in bin " << c.shots.bin << "\n";
  Table t{{"g2", "stderr", "n_trials"}, {{est.value, est.std_error, static_cast<double>(est.n_trials)}}};
  emit_table(o, c, out, t);
  return kExitOk;
}

int fit_cmd(const Options& o, std::ostream& out, std::ostream& err) {
  auto c = load_config(o);
  if (o.format.empty()) c.format = OutputFormat::Json;
  const auto table = Table::from_csv(read_file(o.in));
  const auto x = table.column("delta_rad_s");
  const auto y = table.column("intensity");
  const double hint = o.t_total.empty() ? c.ramsey.t_total() : parse_time(o.t_total);
  const auto fit = fit_sinusoid(x, y, hint);
  err << "fit: " << x.size() << " points, t_total hint " << ns_string(hint) << ", "
      << (fit.converged ? "converged" : "not converged") << " after " << fit.iterations << " iterations\n";
  if (fit.frequency_warning) err << "fit: warning, fitted frequency is more than 10% from the hint\n";
  if (fit.degenerate) err << "fit: warning, flat data; visibility reported as 0\n";

  if (c.format == OutputFormat::Csv) {
    Table t{{"offset", "amplitude", "frequency", "phase", "visibility", "residual_rms", "iterations", "converged",
             "degenerate", "frequency_warning"},
            {{fit.offset, fit.amplitude, fit.frequency, fit.phase, fit.visibility, fit.residual_rms,
              static_cast<double>(fit.iterations), fit.converged ? 1.0 : 0.0, fit.degenerate ? 1.0 : 0.0,
              fit.frequency_warning ? 1.0 : 0.0}}};
    emit(o, out, t.to_csv());
    return kExitOk;
  }
  nlohmann::ordered_json j;
  j["offset"] = fit.offset;
  j["amplitude"] = fit.amplitude;
  j["frequency"] = fit.frequency;
  j["phase"] = fit.phase;
  j["visibility"] = fit.visibility;
  j["residual_rms"] = fit.residual_rms;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["degenerate"] = fit.degenerate;
  j["frequency_warning"] = fit.frequency_warning;
  emit(o, out, j.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rydberg qutrit pulse-sequence simulator", args.empty() ? "seqlab" : args.front()};
  app.require_subcommand(1);
  Options o;

  auto* ramsey = app.add_subcommand("ramsey-scan", "Ramsey fringe intensity versus mu1 detuning");
  add_common(ramsey, o);
  auto* rabi = app.add_subcommand("rabi-scan", "time-bin populations versus mu2 pulse length");
  add_common(rabi, o);
  auto* readout = app.add_subcommand("readout", "time-bin read-out of a pulse sequence");
  add_common(readout, o);
  readout->add_option("--seq", o.seq, "pulse-sequence file (default: built-in Ramsey + read-out)");
  auto* g2 = app.add_subcommand("g2", "zero-delay g2 from sampled or recorded shots");
  add_common(g2, o);
  g2->add_option("--seq", o.seq, "pulse-sequence file for the readout source");
  g2->add_option("--in", o.in, "shot-record CSV to analyse instead of sampling");
  g2->add_option("--records", o.records, "also write the sampled shot records here");
  auto* fit = app.add_subcommand("fit", "sinusoidal fit of a Ramsey scan");
  add_common(fit, o);
  fit->add_option("--in", o.in, "scan CSV with delta_rad_s,intensity columns")->required();
  fit->add_option("--t-total", o.t_total, "fringe frequency hint, e.g. 350ns (default: from config)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (ramsey->parsed()) return ramsey_scan_cmd(o, out, err);
    if (rabi->parsed()) return rabi_scan_cmd(o, out, err);
    if (readout->parsed()) return readout_cmd(o, out, err);
    if (g2->parsed()) return g2_cmd(o, out, err);
    return fit_cmd(o, out, err);
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace seqlab
