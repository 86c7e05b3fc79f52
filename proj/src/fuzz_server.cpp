#include "pwaudit/fuzz_server.hpp"

#include "pwaudit/errors.hpp"
#include "pwaudit/text.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <thread>

namespace pwaudit {

namespace {

std::string shell_page() {
    return "<!doctype html>\n"
           "<html>\n"
           "<head>\n"
           "  <meta charset=\"utf-8\">\n"
           "  <title>manifest fuzz harness</title>\n"
           "  <link rel=\"manifest\" href=\"/manifest.json\">\n"
           "</head>\n"
           "<body>\n"
           "  <h1>manifest fuzz harness</h1>\n"
           "  <p>The linked manifest rotates through the session's mutants.\n"
           "     Use the browser's install entry and record what happens with\n"
           "     the record subcommand. Current mutant: <code id=\"m\"></code></p>\n"
           "  <script>\n"
           "    fetch('/status').then(r => r.json()).then(s => {\n"
           "      document.getElementById('m').textContent = s.mutant_id;\n"
           "    });\n"
           "  </script>\n"
           "</body>\n"
           "</html>\n";
}

} // namespace

struct FuzzServer::Impl {
    FuzzSession session;
    std::string store_path;
    httplib::Server server;
    std::thread server_thread;
    std::thread rotation_thread;
    std::atomic<std::size_t> index{0};
    std::atomic<bool> stopping{false};
    std::mutex log_mutex;
    std::mutex stop_mutex;
    std::condition_variable stop_cv;
    int bound_port = 0;

    void record_serve(const std::string& mutant_id) {
        ServeEvent event{now_ms(), mutant_id};
        std::lock_guard<std::mutex> lock(log_mutex);
        session.serve_log.push_back(event);
        if (!store_path.empty())
            append_serve_event(store_path, event);
    }

    void rotation_loop() {
        using namespace std::chrono;
        auto interval = seconds(session.interval_seconds);
        auto next = steady_clock::now() + interval;
        std::unique_lock<std::mutex> lock(stop_mutex);
        while (!stopping) {
            if (stop_cv.wait_until(lock, next, [this] { return stopping.load(); }))
                return;
            index = (index + 1) % session.mutants.size();
            next += interval;
        }
    }
};

FuzzServer::FuzzServer(FuzzSession session, std::string store_path)
    : impl_(std::make_unique<Impl>()) {
    impl_->session = std::move(session);
    impl_->store_path = std::move(store_path);

    impl_->server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(shell_page(), "text/html");
    });
    impl_->server.Get("/manifest.json", [this](const httplib::Request&, httplib::Response& res) {
        const Mutant& m = impl_->session.mutants[impl_->index];
        impl_->record_serve(m.mutant_id);
        res.set_content(m.rendered, "application/manifest+json");
    });
    impl_->server.Get("/status", [this](const httplib::Request&, httplib::Response& res) {
        std::size_t i = impl_->index;
        const Mutant& m = impl_->session.mutants[i];
        Json status{{"mutant_id", m.mutant_id},
                    {"index", i},
                    {"total", impl_->session.mutants.size()}};
        res.set_content(status.dump(), "application/json");
    });
}

FuzzServer::~FuzzServer() {
    stop();
}

void FuzzServer::start(const std::string& host, int port) {
    if (impl_->session.mutants.empty())
        throw BindFailure("session has no mutants to serve");
    if (port == 0) {
        impl_->bound_port = impl_->server.bind_to_any_port(host);
        if (impl_->bound_port <= 0)
            throw BindFailure("cannot bind " + host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            throw BindFailure("cannot bind " + host + ":" + std::to_string(port));
        impl_->bound_port = port;
    }
    impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->rotation_thread = std::thread([this] { impl_->rotation_loop(); });
    impl_->server.wait_until_ready();
}

int FuzzServer::port() const {
    return impl_->bound_port;
}

void FuzzServer::stop() {
    if (!impl_)
        return;
    {
        std::lock_guard<std::mutex> lock(impl_->stop_mutex);
        if (impl_->stopping.exchange(true))
            return;
    }
    impl_->stop_cv.notify_all();
    impl_->server.stop();
    if (impl_->rotation_thread.joinable())
        impl_->rotation_thread.join();
    if (impl_->server_thread.joinable())
        impl_->server_thread.join();
}

std::size_t FuzzServer::current_index() const {
    return impl_->index;
}

const FuzzSession& FuzzServer::session() const {
    return impl_->session;
}

} // namespace pwaudit
