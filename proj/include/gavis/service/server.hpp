#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gavis/agents/backend.hpp"
#include "gavis/agents/pipeline.hpp"
#include "gavis/service/task_store.hpp"

namespace httplib {
class Server;
}

namespace gavis::service {

struct ServerConfig {
    std::filesystem::path data_dir = "data/tasks";
    std::optional<agents::PlannerBackend> planner;
    int max_retries = agents::kMaxRetries;
    int workers = 2;  // 0: tasks only run through execute()
    const agents::Registry* registry = nullptr;  // builtin when null
};

/// The HTTP API plus a worker pool that runs queued tasks. On start-up,
/// tasks left running by a previous process are marked failed and queued
/// ones are picked up again.
class Server {
public:
    explicit Server(ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Blocks until stop().
    bool listen(const std::string& host, int port);
    /// Returns the chosen port, or -1.
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void wait_until_ready();
    void stop();

    TaskStore& store() noexcept { return store_; }
    /// Runs one task synchronously; the workers use this too.
    void execute(const std::string& id);

private:
    void routes();
    void enqueue(const std::string& id);
    void worker_loop();

    ServerConfig config_;
    TaskStore store_;
    std::unique_ptr<httplib::Server> http_;
    std::mutex qmu_;
    std::condition_variable qcv_;
    std::deque<std::string> queue_;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

} // namespace gavis::service
