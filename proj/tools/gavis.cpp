// gavis: command line front end over the compiler, planner, service and bench.
//
// Exit status: 0 ok, 1 diagnostics, 2 usage.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gavis/agents/backend.hpp"
#include "gavis/agents/pipeline.hpp"
#include "gavis/agents/planner.hpp"
#include "gavis/algebra/blade.hpp"
#include "gavis/service/bench.hpp"
#include "gavis/service/compile.hpp"
#include "gavis/service/server.hpp"

using namespace gavis;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kDiagnostics = 1, kUsage = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void print_diagnostics(const std::string& file, const std::vector<script::Diagnostic>& ds) {
    for (const auto& d : ds) std::cerr << file << ": " << script::format(d) << "\n";
}

int report(const Error& e) {
    std::cerr << "error [" << e.code() << "] " << e.what() << "\n";
    return kDiagnostics;
}

std::optional<agents::PlannerBackend> backend_of(const std::string& url) {
    if (url.empty()) return std::nullopt;
    return agents::PlannerBackend{url};
}

const char* env_or(const char* name, const char* fallback) {
    const char* v = std::getenv(name);
    return v && *v ? v : fallback;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric algebra scripts: compile, run, plan, serve, bench."};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string file, space = "cga3d", target = "python";
    std::vector<std::string> binds;

    auto* compile = app.add_subcommand("compile", "Compile a script and print the generated code");
    compile->add_option("file", file, "Script file")->required()->check(CLI::ExistingFile);
    compile->add_option("--space", space, "Algebra space (cga3d, euclid3d)")->capture_default_str();
    compile->add_option("--target", target, "Output language (python, json-ir)")->capture_default_str();

    auto* run = app.add_subcommand("run", "Evaluate a script and print its outputs and scene");
    run->add_option("file", file, "Script file")->required()->check(CLI::ExistingFile);
    run->add_option("--space", space, "Algebra space (cga3d, euclid3d)")->capture_default_str();
    run->add_option("--bind", binds, "Input value as name=number; repeatable");

    std::string description, formula, language = "python", planner_url;
    bool execute = false;
    auto* plan = app.add_subcommand("plan", "Decompose a task description into subtasks");
    plan->add_option("description", description, "Task description")->required();
    plan->add_option("--formula", formula, "GA formula given with the task");
    plan->add_option("--space", space, "Algebra space (cga3d, euclid3d)")->capture_default_str();
    plan->add_option("--language", language, "Output language (python, json-ir)")->capture_default_str();
    plan->add_option("--planner-url", planner_url, "External planner backend");
    plan->add_flag("--execute", execute, "Also run the agents and print the full result");

    int port = std::atoi(env_or("PORT", "8080"));
    std::string host = "127.0.0.1", data_dir = env_or("DATA_DIR", "data/tasks");
    int max_retries = agents::kMaxRetries, workers = 2;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--port", port, "Port (env PORT)")->capture_default_str()->check(CLI::Range(0, 65535));
    serve->add_option("--host", host, "Address to bind")->capture_default_str();
    serve->add_option("--data-dir", data_dir, "Task store directory (env DATA_DIR)")->capture_default_str();
    serve->add_option("--planner-url", planner_url, "External planner backend (env PLANNER_URL)");
    serve->add_option("--max-retries", max_retries, "Regenerations per subtask")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    serve->add_option("--workers", workers, "Pipeline worker threads")->capture_default_str()->check(CLI::Range(1, 64));

    std::string dataset, report_path;
    auto* bench = app.add_subcommand("bench", "Run a benchmark dataset and write a report");
    bench->add_option("dataset", dataset, "JSONL dataset")->required()->check(CLI::ExistingFile);
    bench->add_option("--report", report_path, "Report output file (stdout when omitted)");
    bench->add_option("--planner-url", planner_url, "External planner backend");
    bench->add_option("--max-retries", max_retries, "Regenerations per subtask")->capture_default_str()
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*compile || *run) {
            service::CompileRequest req;
            req.script = slurp(file);
            req.space = space;
            req.target = *compile ? target : "python";
            for (const auto& b : binds) {
                auto eq = b.find('=');
                char* end = nullptr;
                double v = eq == std::string::npos ? 0 : std::strtod(b.c_str() + eq + 1, &end);
                if (eq == std::string::npos || eq == 0 || end == b.c_str() + eq + 1 || *end != '\0') {
                    std::cerr << "--bind expects name=number, got '" << b << "'\n" << run->help();
                    return kUsage;
                }
                req.overrides[b.substr(0, eq)] = v;
            }
            service::CompileOutcome out = service::compile_script(req);
            print_diagnostics(file, out.diagnostics);
            if (!out.ok) return kDiagnostics;
            if (*compile) {
                std::cout << out.code;
                return kOk;
            }
            json values = json::object();
            for (const auto& [name, mv] : out.values) {
                json blades = json::object();
                for (const auto& [b, c] : mv.terms()) blades[blade_name(b)] = c;
                values[name] = blades;
            }
            std::cout << json{{"outputs", values}, {"scene", codegen::to_json(out.scene)}}.dump(2) << "\n";
            return kOk;
        }

        if (*plan) {
            agents::PlanRequest req{description, formula, space, language};
            auto backend = backend_of(planner_url);
            agents::Plan p = backend ? agents::external_plan(req, *backend) : agents::plan(req);
            if (!execute) {
                std::cout << agents::to_json(p).dump(2) << "\n";
                return kOk;
            }
            try {
                std::cout << agents::to_json(agents::execute_plan(p)).dump(2) << "\n";
            } catch (const agents::PipelineFailed& f) {
                std::cout << agents::to_json(f).dump(2) << "\n";
                return report(f);
            }
            return kOk;
        }

        if (*serve) {
            service::ServerConfig cfg;
            cfg.data_dir = data_dir;
            if (planner_url.empty()) planner_url = env_or("PLANNER_URL", "");
            cfg.planner = backend_of(planner_url);
            cfg.max_retries = max_retries;
            cfg.workers = workers;
            service::Server server(cfg);
            std::cerr << "listening on http://" << host << ":" << port << "\n";
            if (!server.listen(host, port)) {
                std::cerr << "cannot listen on " << host << ":" << port << "\n";
                return kDiagnostics;
            }
            return kOk;
        }

        if (*bench) {
            service::BenchOptions opts;
            opts.pipeline.max_retries = max_retries;
            opts.backend = backend_of(planner_url);
            service::BenchmarkReport r = service::run_bench(service::load_dataset(dataset), opts);
            std::string text = service::to_json(r).dump(2) + "\n";
            if (report_path.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(report_path);
                out << text;
                if (!out) {
                    std::cerr << "cannot write " << report_path << "\n";
                    return kDiagnostics;
                }
            }
            std::cerr << "total " << r.total << ", successes " << r.successes << ", success_rate " << r.success_rate
                      << "%\n";
            for (const auto& o : r.outcomes)
                if (!o.success) std::cerr << "  failed: " << o.id << "\n";
            return kOk;
        }
    } catch (const Error& e) {
        if (e.code() == "UnknownSpace" || e.code() == "UnknownTarget") {
            std::cerr << e.what() << "\n" << app.help();
            return kUsage;
        }
        return report(e);
    }
    return kUsage;
}
