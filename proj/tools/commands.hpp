#pragma once

#include <string>

#include "json.hpp"

namespace pskctl {

using json = nlohmann::json;

enum ExitCode { kPass = 0, kResidualFailure = 1, kUsage = 2 };

// Reads a JSON config file. Throws psk::ConfigError on I/O or syntax errors.
json load_json_file(const std::string& path);
// Rejects unknown keys and wrongly typed values (recursively for measure,
// kernel and series objects).
void check_config(const json& cfg);
// One value per line, first non-numeric line treated as a header; with
// several columns the last one is used.
json load_sequence_csv(const std::string& path);

struct Outcome {
  int code = kPass;
  std::string text;  // report body (JSON or CSV)
  std::string meta;  // JSON sidecar for CSV outputs, empty otherwise
};

Outcome cmd_validate(const json& cfg);
Outcome cmd_lattice_run(const json& cfg);
Outcome cmd_lattice_validate(const json& cfg);
Outcome cmd_psop(const json& cfg);
Outcome cmd_gipa(const json& cfg);
Outcome cmd_accelerate(const json& cfg);
Outcome cmd_pfaffian(const json& cfg);

// Temp file in the target directory, then rename.
void write_atomic(const std::string& path, const std::string& text);

}  // namespace pskctl
