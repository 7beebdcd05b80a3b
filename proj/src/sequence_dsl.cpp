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

#include "seqlab/sequence_dsl.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "seqlab/table_io.hpp"

namespace seqlab {

namespace {

constexpr std::string_view kCanonicalRamsey =
    "# Ramsey interferometer on mu1 with a mu2 pulse in the dark time,\n"
    "# followed by the time-bin read-out of |R1>, |R2>, |R3>.\n"
    "pulse mu1 area=0.5pi duration=20ns\n"
    "pulse mu2 rabi=12.5MHz duration=250ns\n"
    "pulse mu1 area=0.5pi duration=20ns\n"
    "readout bin=1\n"
    "pulse mu1 area=1pi duration=40ns\n"
    "readout bin=2\n"
    "pulse mu2 area=1pi duration=40ns\n"
    "pulse mu1 area=1pi duration=40ns\n"
    "readout bin=3\n";

// Unit conversions shared by the parser and the printer; the printer relies
// on applying exactly the same floating-point operations.
double frequency_from_mhz(double f) { return units::mhz_to_angular(f); }
double time_from_ns(double t) { return t * units::ns; }
double angle_from_pi(double x) { return x * units::pi; }
double rabi_from_area(double x, double duration) { return x * units::pi / duration; }

struct Token {
  std::string_view text;
  int column = 1;
};

class LineParser {
 public:
  LineParser(const SequenceSource& src, int line, std::string_view text)
      : src_(src), line_(line), text_(text) {
    tokenize();
  }

  [[noreturn]] void fail(ParseErrorCode code, int column, const std::string& message) const {
    throw ParseError(code, src_.file_name, line_, column, message);
  }

  const std::vector<Token>& tokens() const { return tokens_; }
  int end_column() const { return static_cast<int>(text_.size()) + 1; }

  // Splits `key=<number><unit>` and converts the number.
  double number_with_unit(const Token& tok, std::size_t value_offset, std::string_view unit) const {
    std::string_view value = tok.text.substr(value_offset);
    const int column = tok.column + static_cast<int>(value_offset);
    if (value.size() < unit.size() || value.substr(value.size() - unit.size()) != unit) {
      fail(ParseErrorCode::BadUnit, column,
           "expected a number with unit '" + std::string(unit) + "', got '" + std::string(value) + "'");
    }
    value.remove_suffix(unit.size());
    double x = 0.0;
    try {
      x = parse_double(value);
    } catch (const ValidationError&) {
      fail(ParseErrorCode::BadNumber, column, "expected a number, got '" + std::string(value) + "'");
    }
    if (!std::isfinite(x)) fail(ParseErrorCode::BadNumber, column, "number must be finite");
    return x;
  }

 private:
  void tokenize() {
    std::size_t i = 0;
    while (i < text_.size()) {
      if (text_[i] == ' ' || text_[i] == '\t' || text_[i] == '\r') {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < text_.size() && text_[i] != ' ' && text_[i] != '\t' && text_[i] != '\r') ++i;
      tokens_.push_back({text_.substr(start, i - start), static_cast<int>(start) + 1});
    }
  }

  const SequenceSource& src_;
  int line_;
  std::string_view text_;
  std::vector<Token> tokens_;
};

struct KeyValue {
  Token token;
  std::size_t value_offset = 0;
};

std::map<std::string_view, KeyValue> collect_keys(const LineParser& p, std::size_t first,
                                                  std::initializer_list<std::string_view> allowed) {
  std::map<std::string_view, KeyValue> keys;
  const auto& toks = p.tokens();
  for (std::size_t k = first; k < toks.size(); ++k) {
    const auto& tok = toks[k];
    const auto eq = tok.text.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      p.fail(ParseErrorCode::Syntax, tok.column,
             "expected key=value, got '" + std::string(tok.text) + "'");
    }
    const auto key = tok.text.substr(0, eq);
    bool known = false;
    std::string expected;
    for (auto a : allowed) {
      known = known || a == key;
      if (!expected.empty()) expected += ", ";
      expected += a;
    }
    if (!known) {
      p.fail(ParseErrorCode::UnknownKey, tok.column,
             "unknown key '" + std::string(key) + "', expected one of " + expected);
    }
    if (keys.contains(key)) {
      p.fail(ParseErrorCode::DuplicateKey, tok.column, "duplicate key '" + std::string(key) + "'");
    }
    keys.emplace(key, KeyValue{tok, eq + 1});
  }
  return keys;
}

DriveSegment parse_pulse(const LineParser& p) {
  const auto& toks = p.tokens();
  if (toks.size() < 2) p.fail(ParseErrorCode::Syntax, p.end_column(), "expected field mu1 or mu2");
  DriveSegment d;
  if (toks[1].text == "mu1") {
    d.field = Field::Mu1;
  } else if (toks[1].text == "mu2") {
    d.field = Field::Mu2;
  } else {
    p.fail(ParseErrorCode::UnknownField, toks[1].column,
           "unknown field '" + std::string(toks[1].text) + "', expected mu1 or mu2");
  }
  const auto keys = collect_keys(p, 2, {"rabi", "area", "detuning", "phase", "duration"});
  const auto find = [&](std::string_view k) -> const KeyValue* {
    const auto it = keys.find(k);
    return it == keys.end() ? nullptr : &it->second;
  };
  const auto* rabi = find("rabi");
  const auto* area = find("area");
  const auto* duration = find("duration");
  if (rabi && area) {
    p.fail(ParseErrorCode::RabiAndArea, area->token.column, "give either rabi= or area=, not both");
  }
  if (!rabi && !area) p.fail(ParseErrorCode::MissingKey, p.end_column(), "expected rabi= or area=");
  if (!duration) {
    if (area) {
      p.fail(ParseErrorCode::AreaWithoutDuration, area->token.column, "area= requires duration=");
    }
    p.fail(ParseErrorCode::MissingKey, p.end_column(), "expected duration=");
  }
  const double t = p.number_with_unit(duration->token, duration->value_offset, "ns");
  if (!(t > 0.0)) {
    p.fail(ParseErrorCode::NonPositiveDuration, duration->token.column, "duration must be positive");
  }
  d.duration = time_from_ns(t);
  if (rabi) {
    const double f = p.number_with_unit(rabi->token, rabi->value_offset, "MHz");
    if (f < 0.0) p.fail(ParseErrorCode::NegativeRabi, rabi->token.column, "rabi must be non-negative");
    d.rabi = frequency_from_mhz(f);
  } else {
    const double x = p.number_with_unit(area->token, area->value_offset, "pi");
    if (x < 0.0) p.fail(ParseErrorCode::NegativeRabi, area->token.column, "area must be non-negative");
    d.rabi = rabi_from_area(x, d.duration);
  }
  if (const auto* det = find("detuning")) {
    d.detuning = frequency_from_mhz(p.number_with_unit(det->token, det->value_offset, "MHz"));
  }
  if (const auto* ph = find("phase")) {
    d.phase = angle_from_pi(p.number_with_unit(ph->token, ph->value_offset, "pi"));
  }
  return d;
}

WaitSegment parse_wait(const LineParser& p) {
  const auto& toks = p.tokens();
  if (toks.size() < 2) p.fail(ParseErrorCode::Syntax, p.end_column(), "expected a duration such as 100ns");
  if (toks.size() > 2) p.fail(ParseErrorCode::Syntax, toks[2].column, "unexpected token after wait duration");
  const double t = p.number_with_unit(toks[1], 0, "ns");
  if (!(t > 0.0)) p.fail(ParseErrorCode::NonPositiveDuration, toks[1].column, "duration must be positive");
  return {time_from_ns(t)};
}

ReadoutSegment parse_readout(const LineParser& p) {
  const auto keys = collect_keys(p, 1, {"bin", "window"});
  const auto bin_it = keys.find("bin");
  if (bin_it == keys.end()) p.fail(ParseErrorCode::MissingKey, p.end_column(), "expected bin=");
  ReadoutSegment r;
  const auto& bin = bin_it->second;
  const double b = p.number_with_unit(bin.token, bin.value_offset, "");
  if (b != 1.0 && b != 2.0 && b != 3.0) {
    p.fail(ParseErrorCode::BinOutOfRange, bin.token.column + static_cast<int>(bin.value_offset),
           "bin must be 1, 2 or 3");
  }
  r.bin = static_cast<int>(b);
  if (const auto it = keys.find("window"); it != keys.end()) {
    const double t = p.number_with_unit(it->second.token, it->second.value_offset, "ns");
    if (t < 0.0) p.fail(ParseErrorCode::NonPositiveDuration, it->second.token.column, "window must be >= 0");
    r.window = time_from_ns(t);
  }
  return r;
}

// Shortest decimal x near value / scale with forward(x) == value, or the
// nearest candidate when no exact preimage exists.
std::optional<double> exact_preimage(double value, double guess, const std::function<double(double)>& forward) {
  std::optional<double> best;
  std::size_t best_len = 0;
  double lo = guess;
  double hi = guess;
  for (int k = 0; k <= 8; ++k) {
    for (double x : {lo, hi}) {
      if (forward(x) != value) continue;
      const auto len = format_double(x).size();
      if (!best || len < best_len) {
        best = x;
        best_len = len;
      }
    }
    lo = std::nextafter(lo, -INFINITY);
    hi = std::nextafter(hi, INFINITY);
  }
  return best;
}

std::string print_value(double value, double scale, const std::function<double(double)>& forward,
                        bool* exact = nullptr) {
  const double guess = value / scale;
  const auto x = exact_preimage(value, guess, forward);
  if (exact) *exact = x.has_value();
  return format_double(x.value_or(guess));
}

}  // namespace

std::string_view to_string(ParseErrorCode code) {
  switch (code) {
    case ParseErrorCode::Syntax: return "syntax";
    case ParseErrorCode::UnknownStatement: return "unknown-statement";
    case ParseErrorCode::UnknownField: return "unknown-field";
    case ParseErrorCode::UnknownKey: return "unknown-key";
    case ParseErrorCode::DuplicateKey: return "duplicate-key";
    case ParseErrorCode::MissingKey: return "missing-key";
    case ParseErrorCode::RabiAndArea: return "rabi-and-area";
    case ParseErrorCode::AreaWithoutDuration: return "area-without-duration";
    case ParseErrorCode::BadUnit: return "bad-unit";
    case ParseErrorCode::BadNumber: return "bad-number";
    case ParseErrorCode::NonPositiveDuration: return "nonpositive-duration";
    case ParseErrorCode::NegativeRabi: return "negative-rabi";
    case ParseErrorCode::BinOutOfRange: return "bin-out-of-range";
    case ParseErrorCode::DuplicateBin: return "duplicate-bin";
    case ParseErrorCode::BinOrder: return "bin-order";
  }
  return "unknown";
}

ParseError::ParseError(ParseErrorCode code, std::string file, int line, int column,
                       const std::string& message)
    : ValidationError(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": error[" +
                      std::string(to_string(code)) + "]: " + message),
      code_(code),
      file_(std::move(file)),
      line_(line),
      column_(column) {}

PulseSequence parse_sequence(const SequenceSource& source) {
  PulseSequence seq;
  seq.label = source.file_name;
  std::string_view rest = source.text;
  int line_no = 0;
  int last_bin = 0;
  while (!rest.empty()) {
    ++line_no;
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    const LineParser p(source, line_no, line);
    if (p.tokens().empty()) continue;
    const auto& head = p.tokens().front();
    if (head.text == "pulse") {
      seq.segments.emplace_back(parse_pulse(p));
    } else if (head.text == "wait") {
      seq.segments.emplace_back(parse_wait(p));
    } else if (head.text == "readout") {
      const auto r = parse_readout(p);
      if (r.bin == last_bin) {
        p.fail(ParseErrorCode::DuplicateBin, head.column, "bin " + std::to_string(r.bin) + " is read out twice");
      }
      if (r.bin < last_bin) {
        p.fail(ParseErrorCode::BinOrder, head.column,
               "bin " + std::to_string(r.bin) + " follows bin " + std::to_string(last_bin));
      }
      last_bin = r.bin;
      seq.segments.emplace_back(r);
    } else {
      p.fail(ParseErrorCode::UnknownStatement, head.column,
             "expected 'pulse', 'wait' or 'readout', got '" + std::string(head.text) + "'");
    }
  }
  return seq;
}

PulseSequence parse_sequence(std::string_view text) {
  return parse_sequence(SequenceSource{std::string(text), "<input>"});
}

std::string format_sequence(const PulseSequence& seq) {
  std::string out;
  for (const auto& segment : seq.segments) {
    if (const auto* d = std::get_if<DriveSegment>(&segment)) {
      out += d->field == Field::Mu1 ? "pulse mu1 " : "pulse mu2 ";
      bool exact = false;
      const auto rabi = print_value(d->rabi, units::mhz_to_angular(1.0), frequency_from_mhz, &exact);
      if (exact) {
        out += "rabi=" + rabi + "MHz";
      } else {
        const double t = d->duration;
        out += "area=" +
               print_value(d->rabi, units::pi / t, [t](double x) { return rabi_from_area(x, t); }) + "pi";
      }
      if (d->detuning != 0.0) {
        out += " detuning=" + print_value(d->detuning, units::mhz_to_angular(1.0), frequency_from_mhz) + "MHz";
      }
      if (d->phase != 0.0) out += " phase=" + print_value(d->phase, units::pi, angle_from_pi) + "pi";
      out += " duration=" + print_value(d->duration, units::ns, time_from_ns) + "ns\n";
    } else if (const auto* w = std::get_if<WaitSegment>(&segment)) {
      out += "wait " + print_value(w->duration, units::ns, time_from_ns) + "ns\n";
    } else {
      const auto& r = std::get<ReadoutSegment>(segment);
      out += "readout bin=" + std::to_string(r.bin);
      if (r.window != kDefaultRetrievalWindow) {
        out += " window=" + print_value(r.window, units::ns, time_from_ns) + "ns";
      }
      out += '\n';
    }
  }
  return out;
}

std::string_view canonical_ramsey_source() { return kCanonicalRamsey; }

PulseSequence canonical_ramsey_sequence() {
  return parse_sequence(SequenceSource{std::string(kCanonicalRamsey), "canonical_ramsey.seq"});
}

}  // namespace seqlab
