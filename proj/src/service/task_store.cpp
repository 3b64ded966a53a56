#include <algorithm>
#include <array>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "gavis/service/task_store.hpp"
#include "util/json_read.hpp"

namespace gavis::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kStatusNames = {"queued", "running", "succeeded", "failed"};

bool valid_id(const std::string& id) {
    return !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](char c) {
               return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
           });
}

} // namespace

std::string_view to_string(TaskStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }

TaskStatus status_by_name(std::string_view name) {
    for (std::size_t i = 0; i < kStatusNames.size(); ++i)
        if (kStatusNames[i] == name) return static_cast<TaskStatus>(i);
    util::schema_error("$.status", "unknown status '" + std::string(name) + "'");
}

std::uint64_t now_ms() {
    using namespace std::chrono;
    return static_cast<std::uint64_t>(duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count());
}

json to_json(const TaskRecord& r) {
    return {{"id", r.id},
            {"request", agents::to_json(r.request)},
            {"status", std::string(to_string(r.status))},
            {"plan", r.plan},
            {"script", r.script},
            {"code", r.code},
            {"scene", r.scene},
            {"diagnostics", r.diagnostics},
            {"error", r.error},
            {"created_at", r.created_at},
            {"updated_at", r.updated_at}};
}

TaskRecord task_from_json(const json& j) {
    if (!j.is_object()) util::schema_error("$", "expected an object");
    TaskRecord r;
    r.id = util::str_field(j, "id", "$");
    r.request = agents::request_from_json(util::field(j, "request", "$"), "$.request");
    r.status = status_by_name(util::str_field(j, "status", "$"));
    r.plan = j.value("plan", json());
    r.script = util::opt_str_field(j, "script", "$", "");
    r.code = util::opt_str_field(j, "code", "$", "");
    r.scene = j.value("scene", json());
    r.diagnostics = j.value("diagnostics", json::array());
    r.error = j.value("error", json());
    r.created_at = static_cast<std::uint64_t>(util::num_field(j, "created_at", "$"));
    r.updated_at = static_cast<std::uint64_t>(util::num_field(j, "updated_at", "$"));
    return r;
}

TaskStore::TaskStore(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error("StorageError", "cannot create " + dir_.string() + ": " + ec.message());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir_))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        try {
            std::ifstream in(f);
            TaskRecord r = task_from_json(json::parse(in));
            if (r.id + ".json" != f.filename().string()) throw Error("SchemaViolation", "id does not match file name");
            records_[r.id] = std::move(r);
        } catch (const std::exception& e) {
            std::string w = "skipping unreadable task document " + f.string() + ": " + e.what();
            std::cerr << "warning: " << w << "\n";
            warnings_.push_back(w);
        }
    }
}

fs::path TaskStore::path_of(const std::string& id) const { return dir_ / (id + ".json"); }

void TaskStore::save(const TaskRecord& record) {
    if (!valid_id(record.id)) throw Error("StorageError", "invalid task id '" + record.id + "'");
    std::lock_guard lock(mu_);
    if (auto it = records_.find(record.id); it != records_.end()) {
        if (static_cast<int>(record.status) < static_cast<int>(it->second.status) ||
            (it->second.status >= TaskStatus::Succeeded && record.status != it->second.status))
            throw Error("InvalidTransition", "task " + record.id + " cannot go from " +
                                                 std::string(to_string(it->second.status)) + " to " +
                                                 std::string(to_string(record.status)));
    }
    fs::path target = path_of(record.id);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << to_json(record).dump(2) << "\n";
        if (!out) throw Error("StorageError", "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error("StorageError", "cannot rename " + tmp.string() + ": " + ec.message());
    records_[record.id] = record;
}

std::optional<TaskRecord> TaskStore::load(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

std::vector<TaskRecord> TaskStore::list() const {
    std::vector<TaskRecord> out;
    {
        std::lock_guard lock(mu_);
        for (const auto& [id, r] : records_) out.push_back(r);
    }
    std::stable_sort(out.begin(), out.end(), [](const TaskRecord& a, const TaskRecord& b) {
        return a.created_at != b.created_at ? a.created_at < b.created_at : a.id < b.id;
    });
    return out;
}

std::string TaskStore::new_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(mu_);
    std::string id;
    do {
        std::ostringstream s;
        s << "task-" << std::hex << now_ms() << "-" << ++counter_ << "-" << (rng() & 0xffffff);
        id = s.str();
    } while (records_.count(id));
    return id;
}

std::vector<std::string> TaskStore::warnings() const {
    std::lock_guard lock(mu_);
    return warnings_;
}

} // namespace gavis::service
