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

#include "seqlab/photostats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "seqlab/errors.hpp"
#include "seqlab/table_io.hpp"

namespace seqlab {

namespace {

using units::pi;

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0, 1]");
  }
}

void require_efficiency(const BinEfficiency& eta) {
  for (double e : eta) require_probability(e, "retrieval efficiency");
}

Eigen::Matrix4cd embed_unitary(const Matrix3c& u) {
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Identity();
  out.topLeftCorner<3, 3>() = u;
  return out;
}

// Takes the |R1> population out of rho and returns it.
double retrieve(Eigen::MatrixXcd& rho) {
  const double p = rho(0, 0).real();
  rho.row(0).setZero();
  rho.col(0).setZero();
  return p;
}

void dephase_spin_wave(Eigen::MatrixXcd& rho, double rate, double delay) {
  const double keep = std::exp(-rate * delay);
  const double qutrit_weight = rho.topLeftCorner<3, 3>().trace().real();
  rho.topLeftCorner<3, 3>() *= keep;
  rho.topRightCorner<3, 1>() *= std::sqrt(keep);
  rho.bottomLeftCorner<1, 3>() *= std::sqrt(keep);
  rho(kLossLevel, kLossLevel) += (1.0 - keep) * qutrit_weight;
}

std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

template <typename TrialFn>
std::vector<ShotRecord> generate_blocks(std::uint64_t n_trials, std::uint64_t seed, TrialFn trial) {
  if (n_trials == 0) throw ValidationError("n_trials must be positive");
  std::vector<ShotRecord> records(n_trials);
  for (std::uint64_t begin = 0, block = 0; begin < n_trials; begin += kShotBlockSize, ++block) {
    auto engine = block_engine(seed, block);
    const auto end = std::min(n_trials, begin + kShotBlockSize);
    for (auto i = begin; i < end; ++i) trial(engine, records[i]);
  }
  return records;
}

void add_dark_counts(std::mt19937_64& engine, ShotRecord& rec, double dark_rate) {
  if (dark_rate <= 0.0) return;
  std::bernoulli_distribution dark(dark_rate);
  for (auto& bin : rec.counts) {
    for (auto& c : bin) c += dark(engine) ? 1u : 0u;
  }
}

}  // namespace

void TimeBinPopulations::validate() const {
  for (double x : p) require_probability(x, "bin probability");
  require_efficiency(eta);
  if (sum() > 1.0 + 1e-9) throw ValidationError("bin probabilities sum to more than 1");
}

DriveSegment ReadoutPulses::mu1_pi() const {
  return {Field::Mu1, pi / mu1_pi_duration, 0.0, 0.0, mu1_pi_duration};
}

DriveSegment ReadoutPulses::mu2_pi() const {
  return {Field::Mu2, pi / mu2_pi_duration, 0.0, 0.0, mu2_pi_duration};
}

ReadoutTiming ReadoutTiming::canonical() {
  const ReadoutPulses pulses;
  return {{kDefaultRetrievalWindow + pulses.mu1_pi_duration,
           kDefaultRetrievalWindow + pulses.mu2_pi_duration + pulses.mu1_pi_duration}};
}

ReadoutTiming ReadoutTiming::from_sequence(const PulseSequence& seq) {
  std::array<std::optional<double>, 3> start;
  double t = 0.0;
  for (const auto& s : seq.segments) {
    if (const auto* r = std::get_if<ReadoutSegment>(&s)) {
      if (r->bin >= 1 && r->bin <= 3) start[static_cast<std::size_t>(r->bin - 1)] = t;
    }
    t += duration_of(s);
  }
  if (!start[0] || !start[1] || !start[2]) {
    throw ValidationError("sequence must read out bins 1, 2 and 3 to define read-out timing");
  }
  return {{*start[1] - *start[0], *start[2] - *start[1]}};
}

TimeBinPopulations readout_populations(const QutritState& state, const BinEfficiency& eta,
                                       const ReadoutPulses& pulses) {
  return readout_populations(DensityMatrix::from_state(state), eta, std::nullopt,
                             ReadoutTiming::canonical(), pulses);
}

TimeBinPopulations readout_populations(const DensityMatrix& rho_in, const BinEfficiency& eta,
                                       std::optional<double> dephasing_rate,
                                       const ReadoutTiming& timing, const ReadoutPulses& pulses) {
  require_efficiency(eta);
  if (rho_in.dim() != kQutritWithLoss) {
    throw ValidationError("read-out expects a four-level density matrix");
  }
  if (std::abs(rho_in.trace() - 1.0) > 1e-8) throw ValidationError("read-out input is not normalized");
  if (dephasing_rate && !(*dephasing_rate >= 0.0)) {
    throw ValidationError("dephasing rate must be non-negative");
  }
  const Eigen::Matrix4cd mu1 = embed_unitary(segment_propagator(pulses.mu1_pi()));
  const Eigen::Matrix4cd mu2 = embed_unitary(segment_propagator(pulses.mu2_pi()));

  Eigen::MatrixXcd rho = rho_in.matrix();
  TimeBinPopulations out;
  out.eta = eta;
  out.p[0] = eta[0] * retrieve(rho);
  if (dephasing_rate) dephase_spin_wave(rho, *dephasing_rate, timing.inter_bin_delay[0]);
  rho = mu1 * rho * mu1.adjoint();
  out.p[1] = eta[1] * retrieve(rho);
  if (dephasing_rate) dephase_spin_wave(rho, *dephasing_rate, timing.inter_bin_delay[1]);
  const Eigen::Matrix4cd both = mu1 * mu2;
  rho = both * rho * both.adjoint();
  out.p[2] = eta[2] * retrieve(rho);
  return out;
}

TimeBinPopulations sequence_readout(const DensityMatrix& rho_in, const PulseSequence& seq,
                                    const BinEfficiency& eta, std::optional<double> dephasing_rate) {
  require_efficiency(eta);
  seq.validate();
  if (rho_in.dim() != kQutritWithLoss) {
    throw ValidationError("read-out expects a four-level density matrix");
  }
  if (std::abs(rho_in.trace() - 1.0) > 1e-8) throw ValidationError("read-out input is not normalized");
  if (dephasing_rate && !(*dephasing_rate >= 0.0)) {
    throw ValidationError("dephasing rate must be non-negative");
  }
  Eigen::MatrixXcd rho = rho_in.matrix();
  TimeBinPopulations out;
  out.eta = eta;
  bool storing = false;
  for (const auto& segment : seq.segments) {
    if (const auto* r = std::get_if<ReadoutSegment>(&segment)) {
      const auto b = static_cast<std::size_t>(r->bin - 1);
      out.p[b] = eta[b] * retrieve(rho);
      storing = true;
    } else {
      const Eigen::Matrix4cd u = embed_unitary(segment_propagator(segment, seq.frame));
      rho = u * rho * u.adjoint();
    }
    if (storing && dephasing_rate) dephase_spin_wave(rho, *dephasing_rate, duration_of(segment));
  }
  return out;
}

PulseSequence rabi_preparation(double omega_mu2, double t_mu2, double t_half_pi) {
  if (!(t_half_pi > 0.0)) throw ValidationError("t_half_pi must be positive");
  PulseSequence seq;
  seq.segments.emplace_back(DriveSegment{Field::Mu1, pi / (2.0 * t_half_pi), 0.0, 0.0, t_half_pi});
  if (t_mu2 > 0.0) seq.segments.emplace_back(DriveSegment{Field::Mu2, omega_mu2, 0.0, 0.0, t_mu2});
  return seq;
}

std::vector<RabiPoint> rabi_scan(double omega_mu2, std::span<const double> t_mu2_values,
                                 double t_half_pi) {
  if (!(omega_mu2 >= 0.0)) throw ValidationError("omega_mu2 must be non-negative");
  std::vector<RabiPoint> out;
  out.reserve(t_mu2_values.size());
  for (const double t : t_mu2_values) {
    if (!(t >= 0.0)) throw ValidationError("t_mu2 values must be non-negative");
    const auto state = propagate_sequence(QutritState::basis(R1), rabi_preparation(omega_mu2, t, t_half_pi));
    out.push_back({t, readout_populations(state)});
  }
  return out;
}

std::vector<ShotRecord> sample_shots(const TimeBinPopulations& pops, std::uint64_t n_trials,
                                     std::uint64_t seed, double dark_rate, double p2) {
  pops.validate();
  require_probability(dark_rate, "dark count probability");
  require_probability(p2, "double excitation probability");
  const double c1 = pops.p[0];
  const double c2 = c1 + pops.p[1];
  const double c3 = c2 + pops.p[2];
  return generate_blocks(n_trials, seed, [&](std::mt19937_64& engine, ShotRecord& rec) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::bernoulli_distribution arm_a(0.5);
    if (p2 > 0.0 && uniform(engine) < p2) {
      for (int k = 0; k < 2; ++k) ++rec.counts[0][arm_a(engine) ? ArmA : ArmB];
    } else {
      const double u = uniform(engine);
      const int bin = u < c1 ? 0 : u < c2 ? 1 : u < c3 ? 2 : -1;
      if (bin >= 0) ++rec.counts[static_cast<std::size_t>(bin)][arm_a(engine) ? ArmA : ArmB];
    }
    add_dark_counts(engine, rec, dark_rate);
  });
}

std::vector<ShotRecord> sample_poisson_shots(const std::array<double, 3>& mean_photons,
                                             std::uint64_t n_trials, std::uint64_t seed,
                                             double dark_rate) {
  for (double m : mean_photons) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw ValidationError("mean photon number must be >= 0");
  }
  require_probability(dark_rate, "dark count probability");
  return generate_blocks(n_trials, seed, [&](std::mt19937_64& engine, ShotRecord& rec) {
    for (std::size_t b = 0; b < 3; ++b) {
      if (mean_photons[b] == 0.0) continue;
      std::poisson_distribution<std::uint32_t> photons(mean_photons[b]);
      const auto n = photons(engine);
      if (n == 0) continue;
      std::binomial_distribution<std::uint32_t> split(n, 0.5);
      const auto a = split(engine);
      rec.counts[b][ArmA] += a;
      rec.counts[b][ArmB] += n - a;
    }
    add_dark_counts(engine, rec, dark_rate);
  });
}

std::string shot_records_csv(std::span<const ShotRecord> records) {
  std::string out = "trial,binA1,binB1,binA2,binB2,binA3,binB3\n";
  std::uint64_t trial = 0;
  for (const auto& rec : records) {
    out += std::to_string(trial++);
    for (const auto& bin : rec.counts) {
      out += ',';
      out += std::to_string(bin[ArmA]);
      out += ',';
      out += std::to_string(bin[ArmB]);
    }
    out += '\n';
  }
  return out;
}

std::vector<ShotRecord> parse_shot_records_csv(std::string_view text) {
  const auto table = Table::from_csv(text);
  static const std::vector<std::string> expected{"trial", "binA1", "binB1", "binA2",
                                                 "binB2", "binA3", "binB3"};
  if (table.columns != expected) {
    throw ValidationError("shot record header must be trial,binA1,binB1,binA2,binB2,binA3,binB3");
  }
  std::vector<ShotRecord> records;
  records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    ShotRecord rec;
    for (std::size_t k = 1; k < 7; ++k) {
      const double v = row[k];
      if (!(v >= 0.0) || v != std::floor(v) || v > std::numeric_limits<std::uint32_t>::max()) {
        throw ValidationError("shot counts must be non-negative integers");
      }
      rec.counts[(k - 1) / 2][(k - 1) % 2] = static_cast<std::uint32_t>(v);
    }
    records.push_back(rec);
  }
  return records;
}

G2Estimate estimate_g2(std::span<const ShotRecord> records, int bin, std::uint64_t bootstrap_seed) {
  if (records.size() < 2) throw ValidationError("g2 estimate needs at least 2 trials");
  if (bin < 1 || bin > 3) throw ValidationError("bin must be 1, 2 or 3");

  // Trials only matter through their (nA, nB) pair, so a bootstrap resample is
  // a multinomial draw over the distinct pairs.
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> histogram;
  for (const auto& rec : records) ++histogram[{rec.count(bin, ArmA), rec.count(bin, ArmB)}];
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::vector<std::uint64_t> weights;
  for (const auto& [key, n] : histogram) {
    pairs.push_back(key);
    weights.push_back(n);
  }

  const auto ratio = [&](const std::vector<std::uint64_t>& w) {
    double sa = 0.0, sb = 0.0, sab = 0.0, n = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto wk = static_cast<double>(w[k]);
      sa += wk * pairs[k].first;
      sb += wk * pairs[k].second;
      sab += wk * static_cast<double>(pairs[k].first) * pairs[k].second;
      n += wk;
    }
    if (sa == 0.0 || sb == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return n * sab / (sa * sb);
  };

  G2Estimate est;
  est.n_trials = records.size();
  est.value = ratio(weights);
  if (std::isnan(est.value)) {
    est.defined = false;
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    return est;
  }

  std::mt19937_64 engine(bootstrap_seed);
  const auto total = static_cast<std::uint64_t>(records.size());
  std::vector<double> boot;
  boot.reserve(kBootstrapResamples);
  std::vector<std::uint64_t> draw(pairs.size());
  for (int r = 0; r < kBootstrapResamples; ++r) {
    std::uint64_t remaining = total;
    std::uint64_t weight_left = total;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (k + 1 == pairs.size() || remaining == 0) {
        draw[k] = remaining;
      } else {
        std::binomial_distribution<std::uint64_t> pick(
            remaining, static_cast<double>(weights[k]) / static_cast<double>(weight_left));
        draw[k] = pick(engine);
      }
      remaining -= draw[k];
      weight_left -= weights[k];
    }
    const double g = ratio(draw);
    if (!std::isnan(g)) boot.push_back(g);
  }
  double mean = 0.0;
  for (double g : boot) mean += g;
  mean /= static_cast<double>(boot.size());
  double var = 0.0;
  for (double g : boot) var += (g - mean) * (g - mean);
  est.std_error = boot.size() > 1 ? std::sqrt(var / static_cast<double>(boot.size() - 1)) : 0.0;
  return est;
}

namespace {

struct LinearSinusoid {
  double offset = 0.0;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
  double cost = 0.0;
};

LinearSinusoid linear_fit(std::span<const double> x, std::span<const double> y, double w) {
  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Eigen::Vector3d row(1.0, std::cos(w * x[i]), std::sin(w * x[i]));
    normal += row * row.transpose();
    rhs += row * y[i];
  }
  const Eigen::Vector3d c = normal.ldlt().solve(rhs);
  LinearSinusoid out{c(0), c(1), c(2), 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = c(0) + c(1) * std::cos(w * x[i]) + c(2) * std::sin(w * x[i]) - y[i];
    out.cost += r * r;
  }
  return out;
}

}  // namespace

FitResult fit_sinusoid(std::span<const double> x, std::span<const double> y, double frequency_hint) {
  if (x.size() != y.size()) throw ValidationError("fit abscissa and ordinate lengths differ");
  if (x.size() < 8) throw ValidationError("fit needs at least 8 points");
  if (!(frequency_hint > 0.0) || !std::isfinite(frequency_hint)) {
    throw ValidationError("frequency hint must be positive");
  }
  const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
  const double span = *xmax_it - *xmin_it;
  if (span * frequency_hint < 2.0 * pi * (1.0 - 1e-9)) {
    throw ValidationError("fit data must span at least one period");
  }
  const auto n = x.size();
  const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  const double y_scale = std::max({std::abs(*ymax_it), std::abs(*ymin_it), 1e-300});

  FitResult fit;
  fit.frequency = frequency_hint;
  if (*ymax_it - *ymin_it <= 1e-12 * y_scale) {
    fit.offset = mean;
    fit.degenerate = true;
    fit.converged = true;
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
    return fit;
  }

  // Work in x / x_scale so the frequency parameter is O(span / period).
  const double x_scale = std::max(std::abs(*xmin_it), std::abs(*xmax_it));
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] / x_scale;
  const double w_hint = frequency_hint * x_scale;

  // Periodogram over [0.5, 1.5] x hint, resolving 0.05 rad of phase across the span.
  const double span_s = span / x_scale;
  const double dw = 0.05 / span_s;
  const int grid = std::clamp(static_cast<int>(w_hint / dw), 16, 20000);
  double best_w = w_hint;
  LinearSinusoid best = linear_fit(xs, y, w_hint);
  for (int k = 0; k <= grid; ++k) {
    const double w = w_hint * (0.5 + static_cast<double>(k) / grid);
    const auto cand = linear_fit(xs, y, w);
    if (cand.cost < best.cost) {
      best = cand;
      best_w = w;
    }
  }

  Eigen::Vector4d p(best.offset, std::hypot(best.cos_coeff, best.sin_coeff), best_w,
                    std::atan2(-best.sin_coeff, best.cos_coeff));
  const auto residuals = [&](const Eigen::Vector4d& q, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(static_cast<Eigen::Index>(n));
    if (jac) jac->resize(static_cast<Eigen::Index>(n), 4);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double theta = q(2) * xs[i] + q(3);
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      r(ii) = q(0) + q(1) * c - y[i];
      if (jac) {
        (*jac)(ii, 0) = 1.0;
        (*jac)(ii, 1) = c;
        (*jac)(ii, 2) = -q(1) * xs[i] * s;
        (*jac)(ii, 3) = -q(1) * s;
      }
    }
  };

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  residuals(p, r, &jac);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  const Eigen::Vector4d floor(y_scale, y_scale, 1.0, 1.0);
  for (fit.iterations = 1; fit.iterations <= 200; ++fit.iterations) {
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d grad = jac.transpose() * r;
    Eigen::Matrix4d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal();
    Eigen::Vector4d trial = p + damped.ldlt().solve(-grad);
    // The frequency stays inside the band searched by the periodogram.
    trial(2) = std::clamp(trial(2), 0.5 * w_hint, 1.5 * w_hint);
    const Eigen::Vector4d step = trial - p;
    Eigen::VectorXd r_trial;
    residuals(trial, r_trial, nullptr);
    const double trial_cost = r_trial.squaredNorm();
    if (trial_cost <= cost) {
      const double decrease = cost - trial_cost;
      p = trial;
      cost = trial_cost;
      residuals(p, r, &jac);
      lambda = std::max(lambda / 10.0, 1e-12);
      const double rel =
          (step.cwiseAbs().array() / p.cwiseAbs().cwiseMax(floor).array()).maxCoeff();
      // Stop on a negligible step or a negligible drop in cost; the latter
      // covers near-zero amplitudes, where frequency and phase are free.
      if (rel < 1e-10 || decrease <= 1e-14 * cost || cost <= 1e-30 * y_scale * y_scale) {
        fit.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      // No step lowers the cost at working precision: p is the minimum.
      if (lambda > 1e12) {
        fit.converged = true;
        break;
      }
    }
  }
  fit.iterations = std::min(fit.iterations, 200);

  if (p(1) < 0.0) {
    p(1) = -p(1);
    p(3) += pi;
  }
  fit.offset = p(0);
  fit.amplitude = p(1);
  fit.frequency = p(2) / x_scale;
  fit.phase = std::remainder(p(3), 2.0 * pi);
  fit.residual_rms = std::sqrt(cost / static_cast<double>(n));
  fit.visibility = fit.offset > 0.0 ? std::clamp(fit.amplitude / fit.offset, 0.0, 1.0) : 0.0;
  fit.frequency_warning = std::abs(fit.frequency - frequency_hint) > 0.1 * frequency_hint;
  return fit;
}

FitResult fit_fringe(const FringeScan& scan, double t_total_hint) {
  return fit_sinusoid(scan.deltas(), scan.intensities(), t_total_hint);
}

}  // namespace seqlab
