#pragma once

#include <string>

#include <json.hpp>

#include "molstore/nanopore.hpp"

namespace molstore {

// CSV with header "time_s,current_pA", one row per sample.
void write_trace_csv(const CurrentTrace& trace, const std::string& path);
CurrentTrace read_trace_csv(const std::string& path);

nlohmann::json annotations_to_json(const CurrentTrace& trace);
void write_annotations_json(const CurrentTrace& trace, const std::string& path);

void write_json_file(const nlohmann::json& doc, const std::string& path);

} // namespace molstore
