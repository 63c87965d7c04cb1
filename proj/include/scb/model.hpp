#pragma once

#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "scb/errors.hpp"
#include "scb/program.hpp"

namespace scb {

struct User {
    std::string username;
    std::string about;
    std::string country;
    bool operator==(const User&) const = default;
};

struct Project {
    long long id = 0;
    std::string author;
    std::string title;
    std::string description;
    long long loves = 0;
    long long favorites = 0;
    long long comments = 0;
    Program code;
    long long created_seq = 0;
    bool operator==(const Project&) const = default;
};

enum class EdgeKind { Follow, Favorite };

struct RelationEdge {
    EdgeKind kind = EdgeKind::Follow;
    std::string source;          // username
    std::string target_user;     // follow
    long long target_project = 0;  // favorite
    long long seq = 0;
    bool operator==(const RelationEdge&) const = default;
};

struct CloudVar {
    long long project_id = 0;
    std::string name;
    double value = 0.0;
    bool operator==(const CloudVar&) const = default;
};

struct CommunityStats {
    long long projects = 0;
    long long users = 0;
    long long comments = 0;
    bool operator==(const CommunityStats&) const = default;
};

enum class Relation { Shared, Favorited, Followers, Following };

Relation relation_from_string(const std::string& name);
const char* relation_to_string(Relation r);

enum class CloudWriteMode { Set, Change };

// The community data behind the API service. Reads take a shared lock,
// writes an exclusive one, so a serving session can be queried from many
// threads while cloud writes stay serialized.
class CommunityStore {
  public:
    CommunityStore() = default;
    CommunityStore(const CommunityStore& other);
    CommunityStore& operator=(const CommunityStore& other);

    // Construction (single-writer phase).
    void add_user(User user);
    void add_project(Project project);
    void add_follow(const std::string& source, const std::string& target);
    void add_favorite(const std::string& source, long long project_id);

    const User& user(const std::string& username) const;
    bool has_user(const std::string& username) const;
    const Project& project(long long id) const;
    bool has_project(long long id) const;
    // Metadata view only; code stays behind project().
    Project project_meta(long long id) const;

    // Ordered relation lists. shared/favorited return project ids,
    // followers/following usernames; both ascend by their sequence keys.
    std::vector<long long> project_list(const std::string& username, Relation r) const;
    std::vector<std::string> user_list(const std::string& username, Relation r) const;

    CommunityStats stats() const;

    double cloud_read(long long project_id, const std::string& name) const;
    // Atomic read-modify-write; creates the variable when absent.
    double cloud_write(long long project_id, const std::string& name, CloudWriteMode mode,
                       double value);

    const std::vector<User>& users() const { return users_; }
    const std::vector<Project>& projects() const { return projects_; }
    const std::vector<RelationEdge>& edges() const { return edges_; }
    const std::vector<CloudVar>& cloud_vars() const { return cloud_; }

    // Bumped by every mutation; surfaced as the X-Store-Seq header.
    long long mutation_seq() const;

    std::string to_json() const;               // canonical, versioned
    static CommunityStore from_json(const std::string& text);
    std::string digest() const;                // hex FNV-1a of to_json()

    // Structural checks: unique keys, endpoint existence, edge sanity.
    void validate() const;

  private:
    std::vector<User> users_;
    std::vector<Project> projects_;
    std::vector<RelationEdge> edges_;
    std::vector<CloudVar> cloud_;
    long long next_edge_seq_ = 1;
    long long mutation_seq_ = 0;
    mutable std::shared_mutex mutex_;

    const Project* find_project(long long id) const;
};

}  // namespace scb
