#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankone/kernel.hpp"

namespace rankone {

using json = nlohmann::json;

enum class Verdict { Pass, Fail, NotAsserted };

std::string to_string(Verdict v);

/// Structured outcome of one experiment. `details` holds experiment-specific
/// fields that are merged into the top level of the JSON form.
struct ExperimentReport {
  std::string name;
  json parameters = json::object();
  std::map<std::string, double> metrics;
  Verdict verdict = Verdict::NotAsserted;
  /// Name of the precondition that prevented asserting, if any.
  std::string failed_precondition;
  json details = json::object();
  std::vector<std::string> artifacts;

  bool passed() const { return verdict == Verdict::Pass; }
  json to_json() const;
};

json to_json(const PlanarGradient& g);
json to_json(cplx z);

/// Serializes with sorted keys and every floating-point value printed with 17
/// significant digits, so equal inputs give byte-identical text.
std::string canonical_json(const json& j);

/// Writes canonical JSON followed by a newline. Throws std::runtime_error
/// carrying the path on I/O failure.
void emit_report(const json& report, const std::filesystem::path& path);
void emit_report(const ExperimentReport& report, const std::filesystem::path& path);

}  // namespace rankone
