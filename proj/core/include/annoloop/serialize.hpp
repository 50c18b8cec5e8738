#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "annoloop/oracle.hpp"
#include "annoloop/sampler.hpp"
#include "annoloop/simulation.hpp"

namespace annoloop {

nlohmann::json to_json(const Ordering& ordering);
Ordering ordering_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BatchPlan& plan);
BatchPlan batch_plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DetectorOracle& oracle);
DetectorOracle oracle_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LoopReport& report);

/// `iter,images,gt_objects,predictions,matched,additions,removals,
///  labeled_objects_cum,wb_cum,wt_cum_s` plus one line per iteration.
void write_report_csv(std::ostream& out, const LoopReport& report);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace annoloop
