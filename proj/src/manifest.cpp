#include "fewcycle/manifest.hpp"

#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <stdexcept>

#include "fewcycle/version.hpp"

namespace fewcycle {

namespace {

nlohmann::json base_json(const RunManifest& m) {
  nlohmann::json j;
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["shape"] = m.shape;
  j["cycles"] = m.cycles;
  j["cep"] = m.cep;
  j["detuning"] = m.detuning;
  j["field_ratio"] = m.field_ratio;
  j["integrator"] = {{"mode", step_mode_name(m.integrator.mode)},
                     {"steps_per_cycle", m.integrator.steps_per_cycle},
                     {"rel_tol", m.integrator.rel_tol},
                     {"abs_tol", m.integrator.abs_tol},
                     {"norm_check_interval", m.integrator.norm_check_interval}};
  j["notes"] = m.notes;
  return j;
}

} // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunManifest::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(base_json(*this).dump()));
  return buf;
}

nlohmann::json RunManifest::stable_json() const {
  nlohmann::json j = base_json(*this);
  j["config_digest"] = digest();
  return j;
}

nlohmann::json RunManifest::full_json() const {
  nlohmann::json j = stable_json();
  j["wall_clock"] = wall_clock;
  return j;
}

RunManifest make_manifest(const std::string& command, const PulseSpec& pulse,
                          double detuning, const IntegratorConfig& cfg) {
  RunManifest m;
  m.tool_version = kVersion;
  m.command = command;
  m.shape = shape_name(pulse.shape);
  m.cycles = pulse.cycles;
  m.cep = pulse.cep;
  m.detuning = detuning;
  m.field_ratio = pulse.peak_rabi / pulse.carrier_freq;
  m.integrator = cfg;
  m.wall_clock = now_utc_iso8601();
  return m;
}

std::string now_utc_iso8601() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const char* step_mode_name(StepMode m) {
  return m == StepMode::FixedStep ? "fixed" : "adaptive";
}

StepMode step_mode_from_name(const std::string& name) {
  if (name == "fixed") return StepMode::FixedStep;
  if (name == "adaptive") return StepMode::Adaptive;
  throw std::invalid_argument("unknown step mode: " + name);
}

} // namespace fewcycle
