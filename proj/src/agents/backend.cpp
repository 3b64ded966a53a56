#include <regex>

#include <httplib.h>

#include "gavis/agents/backend.hpp"
#include "util/json_read.hpp"

namespace gavis::agents {

using nlohmann::json;

json backend_request(const PlanRequest& request) {
    json j = to_json(request);
    j["subtask_schema_version"] = kSubtaskSchemaVersion;
    return j;
}

Plan plan_from_backend_response(const PlanRequest& request, const json& response) {
    if (!response.is_object()) util::schema_error("$", "expected an object");
    Plan p;
    p.source = response.contains("source") ? request_from_json(response["source"], "$.source") : request;
    const json& subtasks = util::array_field(response, "subtasks", "$");
    for (std::size_t i = 0; i < subtasks.size(); ++i)
        p.subtasks.push_back(subtask_from_json(subtasks[i], "$.subtasks[" + std::to_string(i) + "]"));
    p.trace = trace_from_json(util::field(response, "trace", "$"), "$.trace");
    check_plan(p);
    return p;
}

Plan external_plan(const PlanRequest& request, const PlannerBackend& backend) {
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(backend.url, m, url_re))
        throw Error("BackendUnavailable", "malformed planner url '" + backend.url + "'");
    std::string path = m[2].matched ? m[2].str() : "/";

    httplib::Client client(m[1].str());
    auto secs = static_cast<time_t>(backend.timeout_seconds);
    auto usecs = static_cast<time_t>((backend.timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    auto res = client.Post(path, backend_request(request).dump(), "application/json");
    if (!res) throw Error("BackendUnavailable", "planner backend: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error("BackendUnavailable", "planner backend answered HTTP " + std::to_string(res->status));
    json body;
    try {
        body = json::parse(res->body);
    } catch (const json::parse_error& e) {
        util::schema_error("$", std::string("response is not JSON: ") + e.what());
    }
    return plan_from_backend_response(request, body);
}

} // namespace gavis::agents
