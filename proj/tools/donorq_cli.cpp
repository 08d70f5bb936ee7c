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

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "donorq/cli.hpp"
#include "donorq/diagnostics.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& path, const std::string& output_override) {
  donorq::ExperimentManifest m = donorq::ExperimentManifest::parse(read_file(path));
  if (!output_override.empty()) m.set("output", output_override);
  donorq::validate_manifest(m);
  const std::string output = m.get_or("output", "-");
  donorq::RunSummary summary;
  if (output == "-") {
    summary = donorq::run_experiment(m, std::cout);
  } else {
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot write " + output);
    summary = donorq::run_experiment(m, out);
    std::cerr << "wrote " << output << "\n";
  }
  for (const auto& [k, v] : summary.values) std::cerr << k << " = " << v << "\n";
  for (const auto& f : summary.flags) std::cerr << "flag: " << f << "\n";
  return summary.flags.empty() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Donor spin-charge qubit simulator"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (overrides DONORQ_THREADS)");

  std::string manifest_path, output_override;
  auto* run_cmd = app.add_subcommand("run", "run an experiment manifest");
  run_cmd->add_option("manifest", manifest_path, "manifest file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--output", output_override, "output path ('-' for stdout)");

  auto* validate_cmd = app.add_subcommand("validate", "check a manifest without running it");
  validate_cmd->add_option("manifest", manifest_path, "manifest file")->required()->check(CLI::ExistingFile);

  std::string dE = "2000 V/m", Ea = "0", Ba = "0", det_E = "0", det_B = "0";
  auto* dump_cmd = app.add_subcommand("dump-hprime", "print H' at one envelope sample");
  dump_cmd->add_option("--dE", dE, "static field detuning");
  dump_cmd->add_option("--Ea", Ea, "electric drive amplitude");
  dump_cmd->add_option("--Ba", Ba, "magnetic drive amplitude");
  dump_cmd->add_option("--detuning-E", det_E, "charge drive detuning");
  dump_cmd->add_option("--detuning-B", det_B, "spin drive detuning");

  auto* list_cmd = app.add_subcommand("list-experiments", "list manifest kinds and their keys");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) setenv("DONORQ_THREADS", std::to_string(threads).c_str(), 1);

  try {
    if (*run_cmd) return run(manifest_path, output_override);
    if (*validate_cmd) {
      donorq::validate_manifest(donorq::ExperimentManifest::parse(read_file(manifest_path)));
      std::cout << manifest_path << ": ok\n";
      return 0;
    }
    if (*dump_cmd) {
      donorq::ExperimentManifest m;
      m.set("kind", "hprime-dump");
      m.set("dE", dE);
      m.set("Ea", Ea);
      m.set("Ba", Ba);
      m.set("detuning_E", det_E);
      m.set("detuning_B", det_B);
      const auto s = donorq::run_experiment(m, std::cout);
      return s.flags.empty() ? 0 : 3;
    }
    if (*list_cmd) {
      for (const auto& e : donorq::experiment_catalog()) {
        std::cout << e.kind << "\n  " << e.description << "\n  keys:";
        for (const auto& k : e.keys) std::cout << ' ' << k;
        std::cout << "\n";
      }
      return 0;
    }
  } catch (const donorq::ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << "\n";
    return 2;
  } catch (const donorq::SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
