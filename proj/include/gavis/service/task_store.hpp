#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gavis/agents/records.hpp"

namespace gavis::service {

enum class TaskStatus { Queued, Running, Succeeded, Failed };

std::string_view to_string(TaskStatus s);
TaskStatus status_by_name(std::string_view name);  // throws SchemaViolation

struct TaskRecord {
    std::string id;
    agents::PlanRequest request;
    TaskStatus status = TaskStatus::Queued;
    nlohmann::json plan;   // null until planned
    std::string script;
    std::string code;
    nlohmann::json scene;  // null unless succeeded
    nlohmann::json diagnostics = nlohmann::json::array();
    nlohmann::json error;  // null, or {code, message, ...}
    std::uint64_t created_at = 0;  // ms since the epoch
    std::uint64_t updated_at = 0;
};

nlohmann::json to_json(const TaskRecord& r);
TaskRecord task_from_json(const nlohmann::json& j);

std::uint64_t now_ms();

/// One JSON document per task under `dir`, written atomically (temp file
/// then rename). Unreadable documents are skipped and reported in
/// warnings(). Status may only move forward.
class TaskStore {
public:
    explicit TaskStore(std::filesystem::path dir);

    /// Throws Error("InvalidTransition") for a backward status change and
    /// Error("StorageError") on I/O failure.
    void save(const TaskRecord& record);
    std::optional<TaskRecord> load(const std::string& id) const;
    /// Ordered by creation time, then id.
    std::vector<TaskRecord> list() const;
    std::string new_id();

    const std::filesystem::path& dir() const noexcept { return dir_; }
    std::vector<std::string> warnings() const;

private:
    std::filesystem::path path_of(const std::string& id) const;

    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::map<std::string, TaskRecord> records_;
    std::vector<std::string> warnings_;
    std::uint64_t counter_ = 0;
};

} // namespace gavis::service
