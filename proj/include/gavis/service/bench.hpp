#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gavis/agents/backend.hpp"
#include "gavis/agents/pipeline.hpp"

namespace gavis::service {

struct Assertion {
    enum class Kind { Executes, ObjectExists, PointNear, OnAllSpheres };
    Kind kind = Kind::Executes;
    std::string object;  // ObjectExists
    int count = 0;
    double x = 0, y = 0, z = 0;
    double tol = 0;
};

struct BenchmarkCase {
    std::string id;
    std::string origin;  // "paper" | "extension"
    std::string category;
    agents::PlanRequest request;
    std::vector<Assertion> expected;
};

/// Dataset problems; the message starts with "line N:".
class DatasetError : public Error {
public:
    DatasetError(std::size_t line, const std::string& message)
        : Error("DatasetError", "line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

BenchmarkCase case_from_json(const nlohmann::json& j);
/// Blank lines are ignored. Throws DatasetError for a parse failure, a
/// case without an `executes` assertion, a duplicate id, an unsupported
/// space or an empty dataset.
std::vector<BenchmarkCase> parse_dataset(const std::string& text);
std::vector<BenchmarkCase> load_dataset(const std::string& path);

struct AssertionOutcome {
    Assertion assertion;
    bool ok = false;
    std::string detail;
};

struct CaseOutcome {
    std::string id;
    std::string origin;
    std::string category;
    bool success = false;
    std::vector<AssertionOutcome> assertions;
    nlohmann::json error;  // null, or the failure payload
};

struct BenchmarkReport {
    int total = 0;
    int successes = 0;
    double success_rate = 0;  // percent
    std::vector<CaseOutcome> outcomes;
};

struct BenchOptions {
    agents::PipelineConfig pipeline;
    std::optional<agents::PlannerBackend> backend;  // local planner when empty
};

/// Checks the assertions against a finished pipeline run.
std::vector<AssertionOutcome> check_assertions(const std::vector<Assertion>& expected,
                                               const agents::PipelineResult* result);

BenchmarkReport run_bench(const std::vector<BenchmarkCase>& cases, const BenchOptions& options = {});

nlohmann::json to_json(const Assertion& a);
nlohmann::json to_json(const BenchmarkReport& r);

} // namespace gavis::service
