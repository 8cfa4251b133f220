#include "molstore/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "molstore/errors.hpp"

namespace molstore {

void write_trace_csv(const CurrentTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open trace file for writing: " + path);
    out << "time_s,current_pA\n";
    char buf[64];
    for (std::size_t i = 0; i < trace.samples_pa.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9e,%.6f\n", trace.time_at_s(i), trace.samples_pa[i]);
        out << buf;
    }
    if (!out)
        throw ConfigError("failed writing trace file: " + path);
}

CurrentTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("time_s,current_pA", 0) != 0)
        throw ConfigError("trace file missing time_s,current_pA header: " + path);

    CurrentTrace trace;
    double first_t = 0.0, second_t = 0.0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("malformed trace row: " + line);
        try {
            const double t = std::stod(line.substr(0, comma));
            const double i_pa = std::stod(line.substr(comma + 1));
            if (row == 0)
                first_t = t;
            else if (row == 1)
                second_t = t;
            trace.samples_pa.push_back(i_pa);
        } catch (const std::exception&) {
            throw ConfigError("malformed trace row: " + line);
        }
        ++row;
    }
    if (trace.samples_pa.empty())
        throw ConfigError("trace file has no samples: " + path);
    trace.sample_interval_us = row >= 2 ? (second_t - first_t) * 1e6 : 5.0;
    if (trace.sample_interval_us <= 0.0)
        throw ConfigError("trace timestamps are not increasing: " + path);
    return trace;
}

nlohmann::json annotations_to_json(const CurrentTrace& trace) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& a : trace.annotations) {
        events.push_back({{"start_s", a.start_s},
                          {"end_s", a.end_s},
                          {"sequence_id", a.sequence_id},
                          {"direction", a.direction == TranslocationDirection::five_to_three
                                            ? "5to3"
                                            : "3to5"}});
    }
    return {{"sample_interval_us", trace.sample_interval_us},
            {"sample_count", trace.size()},
            {"events", events}};
}

void write_json_file(const nlohmann::json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open file for writing: " + path);
    out << doc.dump(2) << '\n';
    if (!out)
        throw ConfigError("failed writing file: " + path);
}

void write_annotations_json(const CurrentTrace& trace, const std::string& path) {
    write_json_file(annotations_to_json(trace), path);
}

} // namespace molstore
