#include "scb/service.hpp"

#include <chrono>

#include <httplib.h>

namespace scb {

using nlohmann::json;

ServiceCore::Response ServiceCore::handle(const std::string& method,
                                          const std::string& path, const Params& params,
                                          const std::string& body) {
    Response res;
    if (method == "GET" && path == "/api/_debug/requests") {
        json j;
        j["requests"] = requests();
        res.body = j.dump();
        res.store_seq = store_.mutation_seq();
        return res;
    }
    requests_.fetch_add(1);
    try {
        QuerySpec spec = translate_request(method, path, params, default_limit_);
        json out;
        if (spec.resource == Resource::Cloud && method == "PUT")
            out = execute_cloud_put(spec, store_, body);
        else
            out = execute_query(spec, store_);
        res.body = out.dump();
    } catch (const ApiError& e) {
        res.status = e.status;
        json j;
        j["error"] = std::string(e.what());
        res.body = j.dump();
    }
    res.store_seq = store_.mutation_seq();
    return res;
}

struct HttpService::Impl {
    httplib::Server server;
};

namespace {

void dispatch(ServiceCore& core, const std::string& method, const httplib::Request& req,
              httplib::Response& res) {
    Params params;
    for (const auto& [k, v] : req.params) params.emplace(k, v);
    ServiceCore::Response out = core.handle(method, req.path, params, req.body);
    res.status = out.status;
    res.set_header("X-Store-Seq", std::to_string(out.store_seq));
    res.set_content(out.body, "application/json");
}

}  // namespace

HttpService::HttpService(CommunityStore& store, const std::string& host, int port,
                         long long default_limit)
    : impl_(std::make_unique<Impl>()), core_(store, default_limit), host_(host) {
    impl_->server.Get(R"(.*)", [this](const httplib::Request& req, httplib::Response& res) {
        dispatch(core_, "GET", req, res);
    });
    impl_->server.Put(R"(.*)", [this](const httplib::Request& req, httplib::Response& res) {
        dispatch(core_, "PUT", req, res);
    });

    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host_);
        if (port_ <= 0) throw TransportError("failed to bind to " + host_);
    } else {
        if (!impl_->server.bind_to_port(host_, port))
            throw TransportError("failed to bind to " + host_ + ":" + std::to_string(port));
        port_ = port;
    }
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    for (int i = 0; i < 5000 && !impl_->server.is_running(); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    if (!impl_->server.is_running()) {
        if (thread_.joinable()) thread_.join();
        throw TransportError("server failed to start on " + host_);
    }
}

HttpService::~HttpService() { stop(); }

std::string HttpService::base_url() const {
    return "http://" + host_ + ":" + std::to_string(port_);
}

void HttpService::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
    if (thread_.joinable()) thread_.join();
}

void HttpService::wait() {
    if (thread_.joinable()) thread_.join();
}

}  // namespace scb
