// hmacsim command line: run single scenarios, compare modes across seeds, emit example configs and
// synthesized schedules.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "hmacsim/experiment.hpp"
#include "hmacsim/scenario_io.hpp"

using namespace hmacsim;

namespace {

// "1..10", "1,2,5" or a mix such as "1..3,7".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            seeds.push_back(std::stoull(part));
        } else {
            const auto lo = std::stoull(part.substr(0, dots));
            const auto hi = std::stoull(part.substr(dots + 2));
            if (hi < lo) throw std::invalid_argument("empty seed range " + part);
            for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
        }
    }
    if (seeds.empty()) throw std::invalid_argument("no seeds given");
    return seeds;
}

std::vector<Mode> parse_modes(const std::string& text) {
    std::vector<Mode> modes;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) modes.push_back(parse_mode(part));
    return modes;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid TDMA/CSMA MAC simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string mode_text;
    std::uint64_t seed = 0;
    double duration = 0.0;
    std::string trace_path, medium_path, gate_path;
    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and print metrics as JSON");
    run_cmd->add_option("--scenario", scenario_path, "Scenario config file")->required();
    run_cmd->add_option("--mode", mode_text, "dcf, tdma or hmac (default: from config)");
    run_cmd->add_option("--seed", seed, "Random seed (default: from config)");
    run_cmd->add_option("--duration", duration, "Simulated seconds (default: from config)");
    run_cmd->add_option("--trace", trace_path, "Write the event trace (time node kind) to this file");
    run_cmd->add_option("--medium-log", medium_path, "Write every transmission to this file");
    run_cmd->add_option("--gate-log", gate_path, "Write every applied gate command to this file");

    std::string modes_text = "dcf,tdma,hmac";
    std::string seeds_text = "1..10";
    std::string output_path;
    unsigned threads = 1;
    auto* compare_cmd = app.add_subcommand("compare", "Run modes x seeds and write a report");
    compare_cmd->add_option("--scenario", scenario_path, "Scenario config file")->required();
    compare_cmd->add_option("--modes", modes_text, "Comma separated modes");
    compare_cmd->add_option("--seeds", seeds_text, "Seeds, e.g. 1..10 or 1,2,3");
    compare_cmd->add_option("--duration", duration, "Simulated seconds (default: from config)");
    compare_cmd->add_option("--output", output_path, "report.csv or report.json (default: CSV to stdout)");
    compare_cmd->add_option("--threads", threads, "Concurrent simulations");

    int example_n = 1;
    bool emit_config = false;
    auto* example_cmd = app.add_subcommand("example", "Print a built-in scenario");
    example_cmd->add_option("--n", example_n, "Example number")->check(CLI::IsMember({1, 2, 3}))->required();
    example_cmd->add_flag("--emit-config", emit_config, "Print the scenario config");

    bool emit_schedule = false;
    auto* schedule_cmd = app.add_subcommand("schedule", "Synthesize schedules without simulating");
    schedule_cmd->add_option("--scenario", scenario_path, "Scenario config file")->required();
    schedule_cmd->add_option("--mode", mode_text, "dcf, tdma or hmac (default: from config)");
    schedule_cmd->add_flag("--emit-schedule", emit_schedule, "Print the schedule records");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            Scenario s = load_scenario(scenario_path);
            if (!mode_text.empty()) s.mode = parse_mode(mode_text);
            if (run_cmd->count("--seed") > 0) s.seed = seed;
            if (duration > 0.0) s.duration_s = duration;

            std::ofstream trace;
            RunOptions options;
            if (!trace_path.empty()) {
                trace = open_out(trace_path);
                options.event_trace = &trace;
            }
            options.record_medium_log = !medium_path.empty();
            options.record_gate_log = !gate_path.empty();
            const RunResult result = run_detailed(s, options);
            if (!medium_path.empty()) {
                auto out = open_out(medium_path);
                write_medium_log(out, s.topology, result.medium_log);
            }
            if (!gate_path.empty()) {
                auto out = open_out(gate_path);
                write_gate_log(out, s.topology, result.gate_log);
            }
            nlohmann::json doc = metrics_to_json(result.metrics);
            doc["mode"] = to_string(s.mode);
            doc["seed"] = s.seed;
            doc["duration_s"] = s.duration_s;
            std::cout << doc.dump(2) << '\n';
        } else if (*compare_cmd) {
            Scenario s = load_scenario(scenario_path);
            if (duration > 0.0) s.duration_s = duration;
            const Report report = run_matrix(s, parse_modes(modes_text), parse_seeds(seeds_text), threads);
            if (output_path.empty()) {
                write_report_csv(std::cout, report);
            } else if (ends_with(output_path, ".json")) {
                auto out = open_out(output_path);
                out << report_to_json(report).dump(2) << '\n';
            } else {
                auto out = open_out(output_path);
                write_report_csv(out, report);
            }
        } else if (*example_cmd) {
            const Scenario s = build_example(example_n);
            if (emit_config) {
                std::cout << scenario_to_json(s).dump(2) << '\n';
            } else {
                const auto conflicts = link_conflicts(s.topology, s.links);
                std::cout << s.name << ": " << s.links.size() << " links, " << conflicts.size() << " conflicts\n";
                for (const auto& c : conflicts) {
                    std::cout << "  " << link_label(s.topology, s.links[c.first]) << " x "
                              << link_label(s.topology, s.links[c.second]) << '\n';
                }
            }
        } else if (*schedule_cmd) {
            Scenario s = load_scenario(scenario_path);
            if (!mode_text.empty()) s.mode = parse_mode(mode_text);
            const ScheduleSet set = schedules_for(s);
            nlohmann::json doc = {{"mode", to_string(s.mode)}, {"schedules", schedules_to_json(s.topology, set.superframes)}};
            if (!emit_schedule) {
                for (std::size_t i = 0; i < set.plan.permitted.size(); ++i) {
                    doc["permitted"][link_label(s.topology, s.links[i])] = set.plan.permitted[i];
                }
                doc["guard_slots"] = set.plan.guard_slots;
            }
            std::cout << doc.dump(2) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
