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

#include <string>
#include <string_view>

#include "seqlab/errors.hpp"
#include "seqlab/qcore.hpp"

// One statement per line; `#` starts a comment.
//
//   pulse <mu1|mu2> (rabi=<f>MHz | area=<x>pi) [detuning=<f>MHz] [phase=<x>pi] duration=<t>ns
//   wait <t>ns
//   readout bin=<1|2|3> [window=<t>ns]
//
// Frequencies are ordinary (MHz) and stored as angular; area form gives
// rabi = x pi / duration.
namespace seqlab {

enum class ParseErrorCode {
  Syntax,
  UnknownStatement,
  UnknownField,
  UnknownKey,
  DuplicateKey,
  MissingKey,
  RabiAndArea,
  AreaWithoutDuration,
  BadUnit,
  BadNumber,
  NonPositiveDuration,
  NegativeRabi,
  BinOutOfRange,
  DuplicateBin,
  BinOrder,
};

std::string_view to_string(ParseErrorCode code);

/// Located parse failure; what() reads `file:line:column: error[code]: message`.
class ParseError : public ValidationError {
 public:
  ParseError(ParseErrorCode code, std::string file, int line, int column, const std::string& message);

  ParseErrorCode code() const { return code_; }
  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ParseErrorCode code_;
  std::string file_;
  int line_;
  int column_;
};

struct SequenceSource {
  std::string text;
  std::string file_name = "<input>";
};

PulseSequence parse_sequence(const SequenceSource& source);
PulseSequence parse_sequence(std::string_view text);

/// Canonical text form. Each number is printed as the shortest decimal that
/// the parser maps back onto the stored value, so parse(format(s)) == s for
/// any parsed s. Values with no such decimal are printed to nearest.
std::string format_sequence(const PulseSequence& seq);

/// Ramsey pulses on mu1 around a mu2 pulse, then the three-bin read-out.
std::string_view canonical_ramsey_source();
PulseSequence canonical_ramsey_sequence();

}  // namespace seqlab
