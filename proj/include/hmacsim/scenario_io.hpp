#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include <json.hpp>

#include "hmacsim/control_plane.hpp"
#include "hmacsim/experiment.hpp"

namespace hmacsim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scenario config file: a JSON key-value tree with sections topology, links, traffic, mode,
// superframe, control, clocks, phy, duration_s and seed. Missing sections take defaults.
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

// Slots as {index, entries: [{dest, tos}], allow_all} records, one superframe per node.
nlohmann::json superframe_to_json(const Superframe& superframe);
Superframe superframe_from_json(const nlohmann::json& doc);
nlohmann::json schedules_to_json(const Topology& topology, const std::map<NodeId, Superframe>& schedules);
std::map<NodeId, Superframe> schedules_from_json(const Topology& topology, const nlohmann::json& doc);

nlohmann::json metrics_to_json(const Metrics& metrics);

void write_report_csv(std::ostream& out, const Report& report);
nlohmann::json report_to_json(const Report& report);

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

void write_medium_log(std::ostream& out, const Topology& topology, std::span<const Transmission> log);
void write_gate_log(std::ostream& out, const Topology& topology, std::span<const GateApplication> log);

}  // namespace hmacsim
