#pragma once

#include "argmine/harness/trainer.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace argmine::harness {

// Compile-time version string (git-describe-style), embedded in reports.
std::string version_string();

// Write-temp-then-rename so readers never observe a partial report.
void write_report_atomic(const nlohmann::json& report, const std::filesystem::path& path);

double round2(double v);

nlohmann::json to_json(const MacroPrf& m);          // percent, 2-decimal rendering
nlohmann::json to_json(const Confusion& c);
nlohmann::json to_json(const EvalResult& e);
nlohmann::json to_json(const RunResult& r);
nlohmann::json to_json(const MeanStd& ms);
nlohmann::json to_json(const RepeatReport& r);

} // namespace argmine::harness
