#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "fewcycle/engine.hpp"
#include "fewcycle/pulse.hpp"

namespace fewcycle {

// Provenance block attached to every emitted result file.  The wall clock is
// volatile and therefore lives only in the sidecar (full form); the stable
// form — and the digest computed over it — must be byte-identical across
// reruns of the same configuration.
struct RunManifest {
  std::string tool_version;
  std::string command;     // subcommand or campaign name
  std::string shape = "square";
  double cycles = 0.0;
  double cep = 0.0;        // NaN when swept over
  double detuning = 0.0;   // carrier/transition, NaN when swept over
  double field_ratio = 0.0; // peak_rabi/carrier, NaN when swept over
  IntegratorConfig integrator;
  std::map<std::string, std::string> notes;
  std::string wall_clock;  // ISO-8601 UTC

  // Canonical (key-sorted) form without the wall clock; includes the digest.
  nlohmann::json stable_json() const;
  // Stable form plus the wall clock, for the sidecar file.
  nlohmann::json full_json() const;
  // FNV-1a 64-bit hex over the canonical serialization (digest field absent).
  std::string digest() const;
};

RunManifest make_manifest(const std::string& command, const PulseSpec& pulse,
                          double detuning, const IntegratorConfig& cfg);

std::string now_utc_iso8601();

std::uint64_t fnv1a64(const std::string& bytes);

const char* step_mode_name(StepMode m);
StepMode step_mode_from_name(const std::string& name);

} // namespace fewcycle
