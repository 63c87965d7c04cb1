#include "scb/fetch.hpp"

#include <httplib.h>

namespace scb {

using nlohmann::json;

TransportResponse InProcessTransport::get(const std::string& path, const Params& params) {
    ServiceCore::Response r = core_.handle("GET", path, params, "");
    return {r.status, r.body};
}

TransportResponse InProcessTransport::put(const std::string& path, const std::string& body) {
    ServiceCore::Response r = core_.handle("PUT", path, {}, body);
    return {r.status, r.body};
}

struct HttpTransport::Impl {
    explicit Impl(const std::string& base) : client(base) {}
    httplib::Client client;
};

namespace {

bool unreserved(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '-' || c == '_' || c == '.' || c == '~';
}

std::string encode_component(const std::string& text) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if (unreserved(static_cast<char>(c))) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xf];
        }
    }
    return out;
}

std::string encode_target(const std::string& path, const Params& params) {
    std::string out;
    std::size_t i = 0;
    while (i <= path.size()) {
        std::size_t j = path.find('/', i);
        if (j == std::string::npos) j = path.size();
        out += encode_component(path.substr(i, j - i));
        if (j < path.size()) out += '/';
        i = j + 1;
    }
    char sep = '?';
    for (const auto& [k, v] : params) {
        out += sep;
        out += encode_component(k) + "=" + encode_component(v);
        sep = '&';
    }
    return out;
}

}  // namespace

HttpTransport::HttpTransport(const std::string& base_url)
    : impl_(std::make_unique<Impl>(base_url)), base_url_(base_url) {
    impl_->client.set_keep_alive(true);
}

HttpTransport::~HttpTransport() = default;

TransportResponse HttpTransport::get(const std::string& path, const Params& params) {
    auto res = impl_->client.Get(encode_target(path, params));
    if (!res)
        throw TransportError("service unreachable at " + base_url_ + " (GET " + path + ")");
    return {res->status, res->body};
}

TransportResponse HttpTransport::put(const std::string& path, const std::string& body) {
    auto res = impl_->client.Put(encode_target(path, {}), body, "application/json");
    if (!res)
        throw TransportError("service unreachable at " + base_url_ + " (PUT " + path + ")");
    return {res->status, res->body};
}

bool is_list_key(const std::string& key) {
    if (key.rfind("/api/users/", 0) != 0) return false;
    for (const char* rel : {"/projects", "/favorites", "/followers", "/following"}) {
        std::string suffix(rel);
        if (key.size() > suffix.size() &&
            key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0) {
            // reject "/api/users//followers"-style keys
            std::string middle = key.substr(11, key.size() - 11 - suffix.size());
            return !middle.empty() && middle.find('/') == std::string::npos;
        }
    }
    return false;
}

Session::Session(std::shared_ptr<Transport> transport) : transport_(std::move(transport)) {}

bool Session::cached(const std::string& key) const { return entries_.count(key) > 0; }

void Session::set_page_limit(long long n) {
    if (n < 1) n = 1;
    if (n > 100) n = 100;
    page_limit_ = n;
}

void Session::begin_run() { run_active_ = true; }
void Session::end_run() { run_active_ = false; }

void Session::flush() {
    if (run_active_)
        throw ApiMisuseError("cache flush is only allowed between runs");
    entries_.clear();
}

namespace {

json parse_body(const TransportResponse& res, const std::string& key) {
    try {
        return json::parse(res.body);
    } catch (const json::parse_error&) {
        throw TransportError("malformed response for " + key);
    }
}

[[noreturn]] void raise_api_error(const TransportResponse& res, const std::string& key) {
    std::string msg = "request failed for " + key;
    try {
        json j = json::parse(res.body);
        if (j.is_object() && j.contains("error")) msg = j["error"].get<std::string>();
    } catch (const json::parse_error&) {
    }
    throw ApiError(res.status, msg);
}

}  // namespace

CacheEntry Session::fetch_list(const std::string& key) {
    json items = json::array();
    long long offset = 0;
    while (true) {
        Params params;
        params["offset"] = std::to_string(offset);
        params["limit"] = std::to_string(page_limit_);
        TransportResponse res = transport_->get(key, params);
        ++requests_;
        if (res.status == 404 && offset == 0) {
            CacheEntry entry;
            entry.value = json::array();
            entry.not_found = true;
            return entry;
        }
        if (res.status != 200) raise_api_error(res, key);
        json page = parse_body(res, key);
        if (!page.is_object() || !page.contains("items") || !page.contains("total"))
            throw TransportError("malformed page for " + key);
        for (auto& item : page["items"]) items.push_back(std::move(item));
        long long total = page["total"].get<long long>();
        offset += page_limit_;
        if (offset >= total) break;
    }
    CacheEntry entry;
    entry.value = std::move(items);
    return entry;
}

CacheEntry Session::fetch_entity(const std::string& key) {
    TransportResponse res = transport_->get(key, {});
    ++requests_;
    if (res.status == 404) {
        CacheEntry entry;
        entry.not_found = true;
        return entry;
    }
    if (res.status != 200) raise_api_error(res, key);
    CacheEntry entry;
    entry.value = parse_body(res, key);
    return entry;
}

const CacheEntry& Session::fetch_all(const std::string& key) {
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
    CacheEntry entry = is_list_key(key) ? fetch_list(key) : fetch_entity(key);
    entry.fetched_at = ++fetch_seq_;
    return entries_.emplace(key, std::move(entry)).first->second;
}

TransportResponse Session::cloud_get(const std::string& path) {
    ++requests_;
    return transport_->get(path, {});
}

TransportResponse Session::cloud_put(const std::string& path, const std::string& body) {
    ++requests_;
    return transport_->put(path, body);
}

std::string Session::serialize_cache() const {
    json doc;
    doc["fetch_seq"] = fetch_seq_;
    json entries = json::array();
    for (const auto& [key, entry] : entries_) {
        json je;
        je["key"] = key;
        je["not_found"] = entry.not_found;
        je["value"] = entry.value;
        je["fetched_at"] = entry.fetched_at;
        entries.push_back(std::move(je));
    }
    doc["entries"] = std::move(entries);
    return doc.dump(2) + "\n";
}

void Session::load_cache(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("session file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("entries"))
        throw ConfigError("session file: missing entries");
    try {
        std::map<std::string, CacheEntry> loaded;
        long long seq = doc.value("fetch_seq", 0LL);
        for (const auto& je : doc["entries"]) {
            CacheEntry entry;
            entry.value = je.at("value");
            entry.not_found = je.at("not_found").get<bool>();
            entry.fetched_at = je.at("fetched_at").get<long long>();
            loaded[je.at("key").get<std::string>()] = std::move(entry);
        }
        entries_ = std::move(loaded);
        fetch_seq_ = seq;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("session file: ") + e.what());
    }
}

}  // namespace scb
