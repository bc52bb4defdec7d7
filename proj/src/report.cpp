#include "rankone/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rankone {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotAsserted: return "not-asserted";
  }
  return "unknown";
}

json ExperimentReport::to_json() const {
  json j = details.is_object() ? details : json::object();
  j["name"] = name;
  j["parameters"] = parameters;
  j["metrics"] = json(metrics);
  j["verdict"] = to_string(verdict);
  if (!failed_precondition.empty()) j["failed_precondition"] = failed_precondition;
  if (!artifacts.empty()) j["artifacts"] = artifacts;
  return j;
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const PlanarGradient& g) {
  return json{{"xi", to_json(g.xi)}, {"zeta", to_json(g.zeta)}};
}

namespace {

void write_string(std::string& out, const std::string& s) {
  // nlohmann's dump handles escaping.
  out += json(s).dump();
}

void write(std::string& out, const json& j) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted keys
        if (!first) out += ',';
        first = false;
        write_string(out, it.key());
        out += ':';
        write(out, it.value());
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        write(out, j[i]);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
      }
      break;
    }
    case json::value_t::string: write_string(out, j.get<std::string>()); break;
    default: out += j.dump(); break;
  }
}

}  // namespace

std::string canonical_json(const json& j) {
  std::string out;
  write(out, j);
  return out;
}

void emit_report(const json& report, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open report file '" + path.string() + "' for writing");
  os << canonical_json(report) << '\n';
  os.flush();
  if (!os) throw std::runtime_error("failed writing report file '" + path.string() + "'");
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& path) {
  emit_report(report.to_json(), path);
}

}  // namespace rankone
