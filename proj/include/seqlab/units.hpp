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

#include <numbers>

// Internal quantities are SI: angular frequencies in rad/s, rates in 1/s,
// times in s. Ordinary-frequency units (MHz) only appear at I/O boundaries.
namespace seqlab::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double ns = 1e-9;
inline constexpr double us = 1e-6;
inline constexpr double MHz = 1e6;

/// Ordinary frequency in MHz -> angular frequency in rad/s.
constexpr double mhz_to_angular(double mhz) { return mhz * (two_pi * MHz); }
constexpr double angular_to_mhz(double omega) { return omega / (two_pi * MHz); }

}  // namespace seqlab::units
