#include <iostream>

#include <httplib.h>

#include "gavis/agents/planner.hpp"
#include "gavis/algebra/signature.hpp"
#include "gavis/service/compile.hpp"
#include "gavis/service/server.hpp"

namespace gavis::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json error_body(const std::string& code, const std::string& message) {
    return {{"error", code}, {"message", message}};
}

json diagnostics_json(const std::vector<script::Diagnostic>& ds) {
    json out = json::array();
    for (const auto& d : ds) out.push_back(agents::to_json(d));
    return out;
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        throw Error("SchemaViolation", std::string("$: body is not JSON: ") + e.what());
    }
}

// Status for a task whose scene or code was asked for but is not available.
int unavailable_status(const TaskRecord& r) {
    if (r.status != TaskStatus::Failed) return 409;
    if (r.error.is_object() && r.error.value("error", "") == "BackendUnavailable") return 503;
    return 422;
}

json unavailable_body(const TaskRecord& r) {
    if (r.status != TaskStatus::Failed)
        return {{"error", "TaskNotReady"}, {"message", "task is " + std::string(to_string(r.status))},
                {"status", std::string(to_string(r.status))}};
    json body = r.error.is_object() ? r.error : error_body("TaskFailed", "task failed");
    body["status"] = "failed";
    if (!body.contains("diagnostics")) body["diagnostics"] = r.diagnostics;
    return body;
}

} // namespace

Server::Server(ServerConfig config)
    : config_(std::move(config)), store_(config_.data_dir), http_(std::make_unique<httplib::Server>()) {
    for (auto r : store_.list()) {
        if (r.status == TaskStatus::Running) {
            r.status = TaskStatus::Failed;
            r.error = error_body("Interrupted", "the service stopped while the task was running");
            r.updated_at = now_ms();
            store_.save(r);
        } else if (r.status == TaskStatus::Queued) {
            queue_.push_back(r.id);
        }
    }
    routes();
    for (int i = 0; i < config_.workers; ++i) workers_.emplace_back([this] { worker_loop(); });
}

Server::~Server() { stop(); }

void Server::stop() {
    {
        std::lock_guard lock(qmu_);
        if (stopping_) return;
        stopping_ = true;
    }
    qcv_.notify_all();
    http_->stop();
    for (auto& t : workers_) t.join();
}

bool Server::listen(const std::string& host, int port) { return http_->listen(host, port); }
int Server::bind_to_any_port(const std::string& host) { return http_->bind_to_any_port(host); }
bool Server::listen_after_bind() { return http_->listen_after_bind(); }
void Server::wait_until_ready() { http_->wait_until_ready(); }

void Server::enqueue(const std::string& id) {
    {
        std::lock_guard lock(qmu_);
        queue_.push_back(id);
    }
    qcv_.notify_one();
}

void Server::worker_loop() {
    for (;;) {
        std::string id;
        {
            std::unique_lock lock(qmu_);
            qcv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (stopping_) return;
            id = queue_.front();
            queue_.pop_front();
        }
        try {
            execute(id);
        } catch (const std::exception& e) {
            std::cerr << "error: task " << id << ": " << e.what() << "\n";
        }
    }
}

void Server::execute(const std::string& id) {
    auto loaded = store_.load(id);
    if (!loaded || loaded->status != TaskStatus::Queued) return;
    TaskRecord r = *loaded;
    r.status = TaskStatus::Running;
    r.updated_at = now_ms();
    store_.save(r);

    agents::PipelineConfig pc;
    pc.max_retries = config_.max_retries;
    pc.registry = config_.registry;
    const agents::Registry& registry = config_.registry ? *config_.registry : agents::builtin_registry();
    try {
        agents::Plan p = config_.planner ? agents::external_plan(r.request, *config_.planner)
                                         : agents::plan(r.request, registry);
        r.plan = agents::to_json(p);
        agents::PipelineResult result = agents::execute_plan(p, pc);
        r.script = result.script.text;
        r.code = result.code;
        r.scene = codegen::to_json(result.scene);
        r.diagnostics = diagnostics_json(result.warnings);
        r.status = TaskStatus::Succeeded;
    } catch (const agents::PipelineFailed& f) {
        r.error = agents::to_json(f);
        r.diagnostics = diagnostics_json(f.diagnostics());
        r.status = TaskStatus::Failed;
    } catch (const Error& e) {
        r.error = error_body(e.code(), e.what());
        r.status = TaskStatus::Failed;
    } catch (const std::exception& e) {
        r.error = error_body("InternalError", e.what());
        r.status = TaskStatus::Failed;
    }
    r.updated_at = now_ms();
    store_.save(r);
}

void Server::routes() {
    auto& s = *http_;

    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const Error& e) {
            send_json(res, e.code() == "SchemaViolation" ? 400 : 500, error_body(e.code(), e.what()));
        } catch (const std::exception& e) {
            send_json(res, 500, error_body("InternalError", e.what()));
        } catch (...) {
            send_json(res, 500, error_body("InternalError", "unknown failure"));
        }
    });

    s.Get("/api/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"ok", true}}); });

    s.Get("/api/registry", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, agents::to_json(config_.registry ? *config_.registry : agents::builtin_registry()));
    });

    s.Post("/api/tasks", [this](const httplib::Request& req, httplib::Response& res) {
        TaskRecord r;
        try {
            r.request = agents::request_from_json(parse_body(req));
            space_by_name(r.request.space);
            codegen::target_by_name(r.request.language);
        } catch (const Error& e) {
            return send_json(res, 400, error_body("SchemaViolation", e.what()));
        }
        if (r.request.description.empty())
            return send_json(res, 400, error_body("SchemaViolation", "$.description: must not be empty"));
        r.id = store_.new_id();
        r.created_at = r.updated_at = now_ms();
        store_.save(r);
        enqueue(r.id);
        send_json(res, 200, {{"id", r.id}, {"status", "queued"}});
    });

    s.Get("/api/tasks", [this](const httplib::Request&, httplib::Response& res) {
        json tasks = json::array();
        for (const auto& r : store_.list()) tasks.push_back(to_json(r));
        send_json(res, 200, {{"tasks", tasks}});
    });

    s.Get(R"(/api/tasks/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
        auto r = store_.load(req.matches[1]);
        if (!r) return send_json(res, 404, error_body("NotFound", "no task " + req.matches[1].str()));
        send_json(res, 200, to_json(*r));
    });

    s.Get(R"(/api/tasks/([A-Za-z0-9_-]+)/(scene|code))", [this](const httplib::Request& req, httplib::Response& res) {
        auto r = store_.load(req.matches[1]);
        if (!r) return send_json(res, 404, error_body("NotFound", "no task " + req.matches[1].str()));
        if (r->status != TaskStatus::Succeeded) return send_json(res, unavailable_status(*r), unavailable_body(*r));
        if (req.matches[2] == "scene") return send_json(res, 200, r->scene);
        res.status = 200;
        res.set_content(r->code, r->request.language == "json-ir" ? "application/json" : "text/plain");
    });

    s.Post("/api/compile", [](const httplib::Request& req, httplib::Response& res) {
        CompileRequest cr;
        try {
            cr = compile_request_from_json(parse_body(req));
            space_by_name(cr.space);
            codegen::target_by_name(cr.target);
        } catch (const Error& e) {
            return send_json(res, 400, error_body("SchemaViolation", e.what()));
        }
        CompileOutcome o = compile_script(cr);
        send_json(res, o.ok ? 200 : 422, to_json(o));
    });
}

} // namespace gavis::service
