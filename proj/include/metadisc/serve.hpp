#pragma once

#include "metadisc/pipeline.hpp"

#include <atomic>
#include <memory>
#include <string>
#include <thread>

namespace metadisc {

/// Stateless classify endpoint: POST /classify with {"text": "..."} returns
/// {"probabilities": [20], "labels": [codes], "warnings": [...]}.
/// Empty payloads get 400; requests that arrive before the artifact is ready
/// get 503.
class ClassifyServer {
public:
    ClassifyServer(std::string host, int port);
    ~ClassifyServer();

    ClassifyServer(const ClassifyServer&) = delete;
    ClassifyServer& operator=(const ClassifyServer&) = delete;

    /// Starts listening in a background thread; returns once the port is bound.
    void start();
    /// Makes the endpoint live once the artifact is loaded.
    void setArtifact(std::shared_ptr<const ModelArtifact> artifact);
    void stop();

    int port() const { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::string host_;
    int port_;
};

/// Blocking convenience used by the CLI: load, then serve until interrupted.
void serveArtifact(const ModelArtifact& artifact, const std::string& host, int port);

} // namespace metadisc
