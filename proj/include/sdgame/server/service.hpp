#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "sdgame/server/machine.hpp"

namespace sdgame::server {

struct ServiceOptions {
    std::string address = "127.0.0.1";
    unsigned short port = 8080;  // 0 picks a free port
    std::string log_dir = "sessions";
    std::size_t threads = 2;
    ServerOptions server;
};

// Websocket endpoint (any path) carrying one JSON protocol message per text
// frame, plus `GET /health`. Each session runs on its own strand; joins
// fill the open lobby session and a new one opens when it is full. Logs go
// to <log_dir>/<session id>.jsonl, each record flushed before the messages
// it causes are sent.
class Service {
public:
    // Validates the options and binds; throws on invalid options or bind
    // failure.
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    unsigned short port() const;
    void start();              // worker threads in the background
    void run_until_signal();   // start, then block until SIGINT/SIGTERM
    void stop();

    nlohmann::json health() const;

    struct Impl;  // defined in service.cpp

private:
    std::shared_ptr<Impl> impl_;
};

}  // namespace sdgame::server
