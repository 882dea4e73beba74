#include "metadisc/serve.hpp"

#include "metadisc/errors.hpp"
#include "metadisc/io_util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <mutex>
#include <thread>

namespace metadisc {

using nlohmann::json;

struct ClassifyServer::Impl {
    httplib::Server server;
    std::thread worker;
    std::shared_ptr<const ModelArtifact> artifact; // null until loaded
    std::mutex artifactMutex;
};

ClassifyServer::ClassifyServer(std::string host, int port)
    : impl_(std::make_unique<Impl>()), host_(std::move(host)), port_(port) {
    impl_->server.Post("/classify", [this](const httplib::Request& req, httplib::Response& res) {
        std::shared_ptr<const ModelArtifact> artifact;
        {
            std::lock_guard<std::mutex> lock(impl_->artifactMutex);
            artifact = impl_->artifact;
        }
        if (!artifact) {
            res.status = 503;
            res.set_content(R"({"error":"model artifact still loading"})", "application/json");
            return;
        }

        std::string text;
        if (!req.body.empty()) {
            try {
                const json body = json::parse(req.body);
                text = body.value("text", "");
            } catch (const json::exception&) {
                text.clear();
            }
        }
        if (trim(text).empty()) {
            res.status = 400;
            res.set_content(R"({"error":"empty payload: expected {\"text\": ...}"})",
                            "application/json");
            return;
        }

        const Classification result = classifyText(*artifact, text);
        json out;
        out["probabilities"] = result.probabilities;
        out["labels"] = result.labels;
        out["warnings"] = result.warnings;
        res.set_content(out.dump(), "application/json");
    });
}

ClassifyServer::~ClassifyServer() { stop(); }

void ClassifyServer::start() {
    if (port_ == 0) {
        port_ = impl_->server.bind_to_any_port(host_);
    } else if (!impl_->server.bind_to_port(host_, port_)) {
        throw metadisc::Error("cannot bind to " + host_ + ":" + std::to_string(port_));
    }
    impl_->worker = std::thread([this]() { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void ClassifyServer::setArtifact(std::shared_ptr<const ModelArtifact> artifact) {
    std::lock_guard<std::mutex> lock(impl_->artifactMutex);
    impl_->artifact = std::move(artifact);
}

void ClassifyServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

void serveArtifact(const ModelArtifact& artifact, const std::string& host, int port) {
    ClassifyServer server(host, port);
    server.setArtifact(std::shared_ptr<const ModelArtifact>(&artifact, [](const ModelArtifact*) {}));
    server.start();
    // Block until the server is stopped externally (SIGINT terminates the process).
    if (server.port() > 0) {
        std::printf("serving POST /classify on %s:%d\n", host.c_str(), server.port());
        std::fflush(stdout);
    }
    for (;;) std::this_thread::sleep_for(std::chrono::seconds(3600));
}

} // namespace metadisc
