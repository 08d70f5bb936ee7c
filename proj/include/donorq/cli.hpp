// Copyright 2026 The donorq Authors
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

// Experiment manifests (key = value text), unit-aware quantity parsing and the
// runner that turns a manifest into a columnar data file.

#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "donorq/core_model.hpp"

namespace donorq {

enum class Dimension { None, Length, Time, Field, AngularFrequency, MagneticField, Angle, Gyromagnetic };

/// "2000 V/m", "5 ns", "117 MHz" (-> 2 pi 117e6 rad/s), "27.97 GHz/T", "33.26 mT",
/// "15 nm", "3pi/4", "0.5 rad". A bare number is taken in SI (rad/s for frequencies).
double parse_quantity(std::string_view text, Dimension dim);

/// Whitespace- or comma-separated values; a trailing unit token applies to all.
std::vector<double> parse_quantity_list(std::string_view text, Dimension dim);

class ManifestError : public std::invalid_argument {
 public:
  ManifestError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentManifest {
  std::vector<std::pair<std::string, std::string>> entries;  // in file order

  static ExperimentManifest parse(std::string_view text);
  std::string render() const;

  bool has(std::string_view key) const;
  const std::string& get(std::string_view key) const;  // throws ManifestError if absent
  std::string get_or(std::string_view key, std::string fallback) const;
  void set(const std::string& key, const std::string& value);
  std::string kind() const { return get("kind"); }
};

struct ExperimentInfo {
  std::string kind;
  std::string description;
  std::vector<std::string> keys;  // kind-specific optional keys (all have defaults)
};
const std::vector<ExperimentInfo>& experiment_catalog();

/// Throws ManifestError naming the offending field.
void validate_manifest(const ExperimentManifest& manifest);

/// Device parameters with the manifest's param.* overrides applied.
SystemParams resolve_params(const ExperimentManifest& manifest);

struct RunSummary {
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<std::string> flags;  // non-empty -> nonzero exit status
};

/// Runs the experiment and writes header + data to `out`.
RunSummary run_experiment(const ExperimentManifest& manifest, std::ostream& out);

/// Rebuilds the manifest from an output file's provenance header.
ExperimentManifest manifest_from_header(std::string_view output_text);

}  // namespace donorq
