#pragma once

#include <string>

#include <json.hpp>

#include "gavis/agents/records.hpp"

namespace gavis::agents {

inline constexpr const char* kSubtaskSchemaVersion = "1";

struct PlannerBackend {
    std::string url;  // "http://host:port/path"
    double timeout_seconds = 30.0;
};

/// Body sent to an external planner.
nlohmann::json backend_request(const PlanRequest& request);

/// Reads `{subtasks, trace}` from a planner response; throws SchemaViolation.
/// An optional `source` holds the request as the backend normalized it.
Plan plan_from_backend_response(const PlanRequest& request, const nlohmann::json& response);

/// POSTs the request to the backend. Throws BackendUnavailable on connection
/// failure, timeout or a non-200 status, SchemaViolation on a bad body.
Plan external_plan(const PlanRequest& request, const PlannerBackend& backend);

} // namespace gavis::agents
