// JSON and CSV outputs of scenario runs. Keys are emitted in sorted order and
// doubles with round-trip precision, so identical runs give identical files.

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qbath/scenarios.hpp"

namespace qbath {

nlohmann::json report_to_json(const ScenarioReport& report);

// Header "t_us,<trace names>", one row per sample.
std::string traces_csv(const ScenarioReport& report);

nlohmann::json sweep_to_json(const SweepResult& sweep);
// Header then exactly one row per axis value.
std::string sweep_csv(const SweepResult& sweep);

std::string spectroscopy_csv(const SpectroscopyResult& spec);

// Creates the directory and writes report.json and traces.csv.
void write_scenario_outputs(const ScenarioReport& report, const std::filesystem::path& out_dir);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace qbath
