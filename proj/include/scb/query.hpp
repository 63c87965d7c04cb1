#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "scb/errors.hpp"
#include "scb/model.hpp"

namespace scb {

enum class Resource {
    User,
    UserProjects,
    UserFavorites,
    UserFollowers,
    UserFollowing,
    Project,
    ProjectCodeMeta,
    Stats,
    Cloud,
};

struct QuerySpec {
    Resource resource{};
    std::string username;
    long long project_id = 0;
    std::string var_name;
    long long offset = 0;
    long long limit = 20;

    bool is_list() const {
        return resource == Resource::UserProjects || resource == Resource::UserFavorites ||
               resource == Resource::UserFollowers || resource == Resource::UserFollowing;
    }
};

// HTTP-shaped failure; carried identically through the in-process and socket
// transports so both paths surface the same errors.
struct ApiError : Error {
    int status;
    ApiError(int status, const std::string& msg) : Error(msg), status(status) {}
};

using Params = std::map<std::string, std::string>;

// Maps method+path+query-params onto a QuerySpec. Throws ApiError 404 for
// unknown routes, 400 for malformed offset/limit (naming the field). limit
// defaults to default_limit and is clamped to 100.
QuerySpec translate_request(const std::string& method, const std::string& path,
                            const Params& params, long long default_limit = 20);

// Read-side execution: list resources slice the relation list by
// (offset, limit); entity resources return single objects. Canonical JSON.
nlohmann::json execute_query(const QuerySpec& spec, const CommunityStore& store);

// PUT /api/cloud/{pid}/{var}. Body must be {"set": v} xor {"change": d}.
// Returns {"value": <new value>}.
nlohmann::json execute_cloud_put(const QuerySpec& spec, CommunityStore& store,
                                 const std::string& body);

nlohmann::json user_item(const User& u);
nlohmann::json project_item(const Project& p);

}  // namespace scb
