#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftag/metric.hpp"

namespace ftag {

// One robot of the input: where it sleeps, when its existence is revealed,
// and whether it starts awake. Initially active robots have release 0.
struct RobotSpec {
    int id = 0;
    Point home;
    double release = 0.0;
    bool initially_active = false;
};

// A full problem input: the metric plus the robot list, actives first and
// releases nondecreasing. The metric is shared, never copied; instances
// are immutable once validated.
struct Instance {
    std::shared_ptr<const MetricSpace> metric;
    std::vector<RobotSpec> robots;

    const RobotSpec* find(int id) const;
    int active_count() const;
    int frozen_count() const;
};

// Confirms all instance invariants. Throws NoActiveRobot, UnsortedReleases,
// InvalidHome, ActiveWithPositiveRelease, or InvalidInstance (duplicate id).
void validate(const Instance& inst);

// The sub-instance holding exactly the robots with release <= time.
Instance truncate(const Instance& inst, double time);

// JSON (de)serialization. load validates; errors carry the field path.
Instance load_instance(const std::string& json_text);
Instance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const Instance& inst);
std::string save_instance(const Instance& inst);

// Point <-> JSON within a given space ({"vertex":"p0"} or
// {"edge":{"index":3,"offset":0.5}}).
nlohmann::json point_to_json(const MetricSpace& m, const Point& p);
Point point_from_json(const MetricSpace& m, const nlohmann::json& j, const std::string& path);

// Graph fragment <-> JSON.
nlohmann::json graph_to_json(const GraphSpec& g);
GraphSpec graph_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace ftag
