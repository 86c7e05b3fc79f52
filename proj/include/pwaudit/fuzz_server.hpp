#pragma once

#include "pwaudit/fuzz.hpp"

#include <memory>
#include <string>

namespace pwaudit {

// Serves a fuzz session over HTTP: GET / is a shell page linking the
// manifest, GET /manifest.json serves the current mutant (logged to the
// serve log), GET /status reports {mutant_id, index, total}. A timer
// advances to the next mutant every interval_seconds, wrapping around.
class FuzzServer {
public:
    // store_path may be empty; otherwise serve events are appended there.
    FuzzServer(FuzzSession session, std::string store_path);
    ~FuzzServer();

    FuzzServer(const FuzzServer&) = delete;
    FuzzServer& operator=(const FuzzServer&) = delete;

    // Binds and serves in a background thread. Throws BindFailure when the
    // address is unavailable. port 0 picks an ephemeral port.
    void start(const std::string& host, int port);
    int port() const;
    void stop();

    std::size_t current_index() const;
    const FuzzSession& session() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace pwaudit
