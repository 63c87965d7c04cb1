#pragma once

#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "scb/query.hpp"
#include "scb/service.hpp"

namespace scb {

struct TransportResponse {
    int status = 0;
    std::string body;
};

// Minimal client-side transport; both implementations surface the same
// status/body pairs so the interpreter cannot tell them apart.
class Transport {
  public:
    virtual ~Transport() = default;
    virtual TransportResponse get(const std::string& path, const Params& params) = 0;
    virtual TransportResponse put(const std::string& path, const std::string& body) = 0;
    // Human-readable service address for transport-error messages.
    virtual std::string endpoint_name() const = 0;
};

class InProcessTransport : public Transport {
  public:
    explicit InProcessTransport(ServiceCore& core) : core_(core) {}
    TransportResponse get(const std::string& path, const Params& params) override;
    TransportResponse put(const std::string& path, const std::string& body) override;
    std::string endpoint_name() const override { return "in-process store"; }

  private:
    ServiceCore& core_;
};

class HttpTransport : public Transport {
  public:
    // base_url like "http://127.0.0.1:8080".
    explicit HttpTransport(const std::string& base_url);
    ~HttpTransport() override;
    TransportResponse get(const std::string& path, const Params& params) override;
    TransportResponse put(const std::string& path, const std::string& body) override;
    std::string endpoint_name() const override { return base_url_; }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::string base_url_;
};

struct CacheEntry {
    nlohmann::json value;   // complete item array for lists, object for entities
    bool not_found = false;  // 404 sentinel: unknown user / project
    long long fetched_at = 0;
};

// Client-side query session: page-walking fetches, a cache keyed by resource
// path without pagination params, request accounting. Entries live for the
// whole session (possibly spanning several runs); flushing is only legal
// between runs.
class Session {
  public:
    explicit Session(std::shared_ptr<Transport> transport);

    bool cached(const std::string& key) const;
    // Fetch through the cache; walks every page for list resources before
    // anything is stored (a failed walk caches nothing).
    const CacheEntry& fetch_all(const std::string& key);

    void begin_run();
    void end_run();
    void flush();  // ApiMisuseError while a run is active

    // Cloud variables deliberately bypass the cache: their whole point is
    // shared live state. Still counted in request accounting.
    TransportResponse cloud_get(const std::string& path);
    TransportResponse cloud_put(const std::string& path, const std::string& body);

    long long requests() const { return requests_; }
    Transport& transport() { return *transport_; }

    int latency_ticks() const { return latency_ticks_; }
    void set_latency_ticks(int n) { latency_ticks_ = n < 1 ? 1 : n; }
    long long page_limit() const { return page_limit_; }
    void set_page_limit(long long n);

    // Named-session persistence: cache contents as canonical JSON.
    std::string serialize_cache() const;
    void load_cache(const std::string& text);

  private:
    std::shared_ptr<Transport> transport_;
    std::map<std::string, CacheEntry> entries_;
    long long requests_ = 0;
    long long fetch_seq_ = 0;
    int latency_ticks_ = 1;
    long long page_limit_ = 20;
    bool run_active_ = false;

    CacheEntry fetch_list(const std::string& key);
    CacheEntry fetch_entity(const std::string& key);
};

// True for the four paginated relation routes.
bool is_list_key(const std::string& key);

}  // namespace scb
