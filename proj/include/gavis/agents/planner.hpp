#pragma once

#include "gavis/agents/records.hpp"
#include "gavis/agents/registry.hpp"

namespace gavis::agents {

/// Deterministic template planner. Each recognized clause of the request
/// becomes one or more subtasks (helper objects such as named centres or
/// through-points get their own creation subtask first). Throws
/// Error("UnrecognizedIntent") quoting the clause it could not read.
Plan plan(const PlanRequest& request, const Registry& registry = builtin_registry());

/// Names for anonymous objects: `<prefix><n>` with one counter per kind,
/// skipping names already taken.
class NameAllocator {
public:
    void reserve(const std::string& name) { taken_.insert(name); }
    bool taken(const std::string& name) const { return taken_.count(name) > 0; }
    std::string allocate(const std::string& kind);

private:
    std::set<std::string> taken_;
    std::map<std::string, int> counters_;
};

std::string kind_prefix(const std::string& kind);

} // namespace gavis::agents
