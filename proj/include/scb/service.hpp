#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "scb/query.hpp"

namespace scb {

// Request handling shared by the HTTP server and the in-process transport,
// so both execution paths run the exact same translate/execute code.
class ServiceCore {
  public:
    explicit ServiceCore(CommunityStore& store, long long default_limit = 20)
        : store_(store), default_limit_(default_limit) {}

    struct Response {
        int status = 200;
        std::string body;  // JSON text
        long long store_seq = 0;
    };

    Response handle(const std::string& method, const std::string& path,
                    const Params& params, const std::string& body);

    // API requests served so far, excluding /api/_debug/* probes.
    long long requests() const { return requests_.load(); }

    CommunityStore& store() { return store_; }
    long long default_limit() const { return default_limit_; }

  private:
    CommunityStore& store_;
    long long default_limit_;
    std::atomic<long long> requests_{0};
};

// Socket front end: binds, serves on a background thread, stops on destruction.
class HttpService {
  public:
    // port 0 picks an ephemeral port.
    HttpService(CommunityStore& store, const std::string& host, int port,
                long long default_limit = 20);
    ~HttpService();

    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    int port() const { return port_; }
    std::string base_url() const;
    ServiceCore& core() { return core_; }
    void stop();
    // Blocks the calling thread until stop() (used by `serve`).
    void wait();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    ServiceCore core_;
    std::thread thread_;
    std::string host_;
    int port_ = 0;
};

}  // namespace scb
