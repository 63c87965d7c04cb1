#include "scb/query.hpp"

#include <charconv>

#include "scb/codemeta.hpp"
#include "scb/jsonutil.hpp"

namespace scb {

using nlohmann::json;

namespace {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> segs;
    std::size_t i = 0;
    if (!path.empty() && path[0] == '/') i = 1;
    while (i <= path.size()) {
        std::size_t j = path.find('/', i);
        if (j == std::string::npos) j = path.size();
        segs.push_back(path.substr(i, j - i));
        i = j + 1;
    }
    if (!segs.empty() && segs.back().empty()) segs.pop_back();
    return segs;
}

[[noreturn]] void unknown_route(const std::string& method, const std::string& path) {
    throw ApiError(404, "unknown route: " + method + " " + path);
}

long long parse_ll_param(const std::string& field, const std::string& text) {
    long long value = 0;
    const char* begin = text.c_str();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ApiError(400, "invalid " + field + ": \"" + text + "\"");
    return value;
}

bool parse_id(const std::string& text, long long& out) {
    if (text.empty()) return false;
    const char* begin = text.c_str();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && out > 0;
}

}  // namespace

QuerySpec translate_request(const std::string& method, const std::string& path,
                            const Params& params, long long default_limit) {
    auto segs = split_path(path);
    for (const auto& s : segs)
        if (s.empty()) unknown_route(method, path);
    if (segs.empty() || segs[0] != "api") unknown_route(method, path);

    QuerySpec spec;
    spec.limit = default_limit;

    if (method == "GET" && segs.size() == 2 && segs[1] == "stats") {
        spec.resource = Resource::Stats;
        return spec;
    }
    if (segs.size() == 4 && segs[1] == "cloud" && (method == "GET" || method == "PUT")) {
        if (!parse_id(segs[2], spec.project_id)) unknown_route(method, path);
        spec.resource = Resource::Cloud;
        spec.var_name = segs[3];
        return spec;
    }
    if (method != "GET") unknown_route(method, path);

    if (segs.size() >= 3 && segs[1] == "users") {
        spec.username = segs[2];
        if (segs.size() == 3) {
            spec.resource = Resource::User;
            return spec;
        }
        if (segs.size() == 4) {
            const std::string& rel = segs[3];
            if (rel == "projects") spec.resource = Resource::UserProjects;
            else if (rel == "favorites") spec.resource = Resource::UserFavorites;
            else if (rel == "followers") spec.resource = Resource::UserFollowers;
            else if (rel == "following") spec.resource = Resource::UserFollowing;
            else unknown_route(method, path);
            if (auto it = params.find("offset"); it != params.end()) {
                spec.offset = parse_ll_param("offset", it->second);
                if (spec.offset < 0) throw ApiError(400, "invalid offset: must be >= 0");
            }
            if (auto it = params.find("limit"); it != params.end()) {
                spec.limit = parse_ll_param("limit", it->second);
                if (spec.limit < 1) throw ApiError(400, "invalid limit: must be >= 1");
            }
            if (spec.limit > 100) spec.limit = 100;
            return spec;
        }
    }
    if (segs.size() >= 3 && segs[1] == "projects") {
        if (!parse_id(segs[2], spec.project_id)) unknown_route(method, path);
        if (segs.size() == 3) {
            spec.resource = Resource::Project;
            return spec;
        }
        if (segs.size() == 4 && segs[3] == "code-meta") {
            spec.resource = Resource::ProjectCodeMeta;
            return spec;
        }
    }
    unknown_route(method, path);
}

json user_item(const User& u) {
    json j;
    j["username"] = u.username;
    j["about"] = u.about;
    j["country"] = u.country;
    return j;
}

json project_item(const Project& p) {
    json j;
    j["id"] = p.id;
    j["title"] = p.title;
    j["description"] = p.description;
    j["loves"] = p.loves;
    j["favorites"] = p.favorites;
    j["comments"] = p.comments;
    j["author"] = p.author;
    return j;
}

namespace {

json page_response(json items, long long total, const QuerySpec& spec) {
    json j;
    j["items"] = std::move(items);
    j["total"] = total;
    j["offset"] = spec.offset;
    j["limit"] = spec.limit;
    return j;
}

template <typename T>
std::vector<T> slice(const std::vector<T>& all, long long offset, long long limit) {
    std::vector<T> out;
    for (long long i = offset; i < static_cast<long long>(all.size()) && i < offset + limit;
         ++i)
        out.push_back(all[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace

json execute_query(const QuerySpec& spec, const CommunityStore& store) {
    try {
        switch (spec.resource) {
            case Resource::User:
                return user_item(store.user(spec.username));
            case Resource::UserProjects:
            case Resource::UserFavorites: {
                Relation rel = spec.resource == Resource::UserProjects ? Relation::Shared
                                                                       : Relation::Favorited;
                auto ids = store.project_list(spec.username, rel);
                json items = json::array();
                for (long long id : slice(ids, spec.offset, spec.limit))
                    items.push_back(project_item(store.project_meta(id)));
                return page_response(std::move(items), static_cast<long long>(ids.size()),
                                     spec);
            }
            case Resource::UserFollowers:
            case Resource::UserFollowing: {
                Relation rel = spec.resource == Resource::UserFollowers
                                   ? Relation::Followers
                                   : Relation::Following;
                auto names = store.user_list(spec.username, rel);
                json items = json::array();
                for (const auto& name : slice(names, spec.offset, spec.limit))
                    items.push_back(user_item(store.user(name)));
                return page_response(std::move(items), static_cast<long long>(names.size()),
                                     spec);
            }
            case Resource::Project:
                return project_item(store.project_meta(spec.project_id));
            case Resource::ProjectCodeMeta:
                return json::parse(code_meta_to_json(code_metadata(store.project(spec.project_id).code)));
            case Resource::Stats: {
                CommunityStats s = store.stats();
                json j;
                j["projects"] = s.projects;
                j["users"] = s.users;
                j["comments"] = s.comments;
                return j;
            }
            case Resource::Cloud: {
                double v = store.cloud_read(spec.project_id, spec.var_name);
                json j;
                j["value"] = json_number(v);
                return j;
            }
        }
    } catch (const NotFoundError& e) {
        throw ApiError(404, e.what());
    }
    throw ApiError(400, "unsupported query");
}

json execute_cloud_put(const QuerySpec& spec, CommunityStore& store,
                       const std::string& body) {
    if (spec.resource != Resource::Cloud) throw ApiError(400, "PUT only supported on cloud variables");
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error&) {
        throw ApiError(400, "body must be a JSON object");
    }
    if (!doc.is_object()) throw ApiError(400, "body must be a JSON object");
    bool has_set = doc.contains("set");
    bool has_change = doc.contains("change");
    if (has_set == has_change)
        throw ApiError(400, "body must contain exactly one of \"set\" or \"change\"");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (it.key() != "set" && it.key() != "change")
            throw ApiError(400, "unknown body field \"" + it.key() + "\"");
    }
    const char* field = has_set ? "set" : "change";
    if (!doc[field].is_number())
        throw ApiError(400, std::string("field \"") + field + "\" must be a number");
    double v = doc[field].get<double>();
    try {
        double nv = store.cloud_write(spec.project_id, spec.var_name,
                                      has_set ? CloudWriteMode::Set : CloudWriteMode::Change,
                                      v);
        json j;
        j["value"] = json_number(nv);
        return j;
    } catch (const NotFoundError& e) {
        throw ApiError(404, e.what());
    } catch (const ValidationError& e) {
        throw ApiError(400, e.what());
    }
}

}  // namespace scb
