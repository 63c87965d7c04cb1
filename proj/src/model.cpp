#include "scb/model.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <json.hpp>

#include "scb/digest.hpp"

namespace scb {

using nlohmann::json;

Relation relation_from_string(const std::string& name) {
    if (name == "shared") return Relation::Shared;
    if (name == "favorited") return Relation::Favorited;
    if (name == "followers") return Relation::Followers;
    if (name == "following") return Relation::Following;
    throw ValidationError("unknown relation: " + name);
}

const char* relation_to_string(Relation r) {
    switch (r) {
        case Relation::Shared: return "shared";
        case Relation::Favorited: return "favorited";
        case Relation::Followers: return "followers";
        case Relation::Following: return "following";
    }
    return "?";
}

CommunityStore::CommunityStore(const CommunityStore& other) {
    std::shared_lock lock(other.mutex_);
    users_ = other.users_;
    projects_ = other.projects_;
    edges_ = other.edges_;
    cloud_ = other.cloud_;
    next_edge_seq_ = other.next_edge_seq_;
    mutation_seq_ = other.mutation_seq_;
}

CommunityStore& CommunityStore::operator=(const CommunityStore& other) {
    if (this == &other) return *this;
    CommunityStore copy(other);
    std::unique_lock lock(mutex_);
    users_ = std::move(copy.users_);
    projects_ = std::move(copy.projects_);
    edges_ = std::move(copy.edges_);
    cloud_ = std::move(copy.cloud_);
    next_edge_seq_ = copy.next_edge_seq_;
    mutation_seq_ = copy.mutation_seq_;
    return *this;
}

void CommunityStore::add_user(User user) {
    std::unique_lock lock(mutex_);
    users_.push_back(std::move(user));
    ++mutation_seq_;
}

void CommunityStore::add_project(Project project) {
    std::unique_lock lock(mutex_);
    projects_.push_back(std::move(project));
    ++mutation_seq_;
}

void CommunityStore::add_follow(const std::string& source, const std::string& target) {
    std::unique_lock lock(mutex_);
    RelationEdge e;
    e.kind = EdgeKind::Follow;
    e.source = source;
    e.target_user = target;
    e.seq = next_edge_seq_++;
    edges_.push_back(std::move(e));
    ++mutation_seq_;
}

void CommunityStore::add_favorite(const std::string& source, long long project_id) {
    std::unique_lock lock(mutex_);
    RelationEdge e;
    e.kind = EdgeKind::Favorite;
    e.source = source;
    e.target_project = project_id;
    e.seq = next_edge_seq_++;
    edges_.push_back(std::move(e));
    ++mutation_seq_;
}

const User& CommunityStore::user(const std::string& username) const {
    std::shared_lock lock(mutex_);
    for (const auto& u : users_) {
        if (u.username == username) return u;
    }
    throw NotFoundError("unknown user: " + username);
}

bool CommunityStore::has_user(const std::string& username) const {
    std::shared_lock lock(mutex_);
    return std::any_of(users_.begin(), users_.end(),
                       [&](const User& u) { return u.username == username; });
}

const Project* CommunityStore::find_project(long long id) const {
    for (const auto& p : projects_) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

const Project& CommunityStore::project(long long id) const {
    std::shared_lock lock(mutex_);
    if (const Project* p = find_project(id)) return *p;
    throw NotFoundError("unknown project: " + std::to_string(id));
}

bool CommunityStore::has_project(long long id) const {
    std::shared_lock lock(mutex_);
    return find_project(id) != nullptr;
}

Project CommunityStore::project_meta(long long id) const {
    std::shared_lock lock(mutex_);
    const Project* p = find_project(id);
    if (!p) throw NotFoundError("unknown project: " + std::to_string(id));
    Project meta = *p;
    meta.code = Program{};
    return meta;
}

std::vector<long long> CommunityStore::project_list(const std::string& username,
                                                    Relation r) const {
    if (r != Relation::Shared && r != Relation::Favorited)
        throw ValidationError("relation does not list projects");
    user(username);  // not-found check
    std::shared_lock lock(mutex_);
    std::vector<long long> out;
    if (r == Relation::Shared) {
        std::vector<const Project*> mine;
        for (const auto& p : projects_) {
            if (p.author == username) mine.push_back(&p);
        }
        std::sort(mine.begin(), mine.end(), [](const Project* a, const Project* b) {
            return a->created_seq < b->created_seq;
        });
        for (const Project* p : mine) out.push_back(p->id);
    } else {
        std::vector<const RelationEdge*> favs;
        for (const auto& e : edges_) {
            if (e.kind == EdgeKind::Favorite && e.source == username) favs.push_back(&e);
        }
        std::sort(favs.begin(), favs.end(),
                  [](const RelationEdge* a, const RelationEdge* b) { return a->seq < b->seq; });
        for (const RelationEdge* e : favs) out.push_back(e->target_project);
    }
    return out;
}

std::vector<std::string> CommunityStore::user_list(const std::string& username,
                                                   Relation r) const {
    if (r != Relation::Followers && r != Relation::Following)
        throw ValidationError("relation does not list users");
    user(username);  // not-found check
    std::shared_lock lock(mutex_);
    std::vector<const RelationEdge*> hits;
    for (const auto& e : edges_) {
        if (e.kind != EdgeKind::Follow) continue;
        if (r == Relation::Followers ? e.target_user == username : e.source == username)
            hits.push_back(&e);
    }
    std::sort(hits.begin(), hits.end(),
              [](const RelationEdge* a, const RelationEdge* b) { return a->seq < b->seq; });
    std::vector<std::string> out;
    for (const RelationEdge* e : hits)
        out.push_back(r == Relation::Followers ? e->source : e->target_user);
    return out;
}

CommunityStats CommunityStore::stats() const {
    std::shared_lock lock(mutex_);
    CommunityStats s;
    s.projects = static_cast<long long>(projects_.size());
    s.users = static_cast<long long>(users_.size());
    for (const auto& p : projects_) s.comments += p.comments;
    return s;
}

double CommunityStore::cloud_read(long long project_id, const std::string& name) const {
    std::shared_lock lock(mutex_);
    if (!find_project(project_id))
        throw NotFoundError("unknown project: " + std::to_string(project_id));
    for (const auto& v : cloud_) {
        if (v.project_id == project_id && v.name == name) return v.value;
    }
    return 0.0;  // unknown variable reads as 0, without creating it
}

double CommunityStore::cloud_write(long long project_id, const std::string& name,
                                   CloudWriteMode mode, double value) {
    if (!std::isfinite(value)) throw ValidationError("cloud value must be finite");
    std::unique_lock lock(mutex_);
    if (!find_project(project_id))
        throw NotFoundError("unknown project: " + std::to_string(project_id));
    ++mutation_seq_;
    for (auto& v : cloud_) {
        if (v.project_id == project_id && v.name == name) {
            v.value = mode == CloudWriteMode::Set ? value : v.value + value;
            return v.value;
        }
    }
    CloudVar nv;
    nv.project_id = project_id;
    nv.name = name;
    nv.value = value;  // absent treated as 0 for change
    cloud_.push_back(nv);
    return nv.value;
}

long long CommunityStore::mutation_seq() const {
    std::shared_lock lock(mutex_);
    return mutation_seq_;
}

namespace {

json number_or_int(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15)
        return json(static_cast<long long>(v));
    return json(v);
}

}  // namespace

std::string CommunityStore::to_json() const {
    std::shared_lock lock(mutex_);
    json doc;
    doc["version"] = 1;
    json users = json::array();
    for (const auto& u : users_) {
        json ju;
        ju["username"] = u.username;
        ju["about"] = u.about;
        ju["country"] = u.country;
        users.push_back(ju);
    }
    doc["users"] = users;
    json projects = json::array();
    for (const auto& p : projects_) {
        json jp;
        jp["id"] = p.id;
        jp["author"] = p.author;
        jp["title"] = p.title;
        jp["description"] = p.description;
        jp["loves"] = p.loves;
        jp["favorites"] = p.favorites;
        jp["comments"] = p.comments;
        jp["created_seq"] = p.created_seq;
        jp["code"] = json::parse(serialize_program(p.code));
        projects.push_back(jp);
    }
    doc["projects"] = projects;
    json edges = json::array();
    for (const auto& e : edges_) {
        json je;
        je["kind"] = e.kind == EdgeKind::Follow ? "follow" : "favorite";
        je["source"] = e.source;
        if (e.kind == EdgeKind::Follow)
            je["target"] = e.target_user;
        else
            je["target"] = e.target_project;
        je["seq"] = e.seq;
        edges.push_back(je);
    }
    doc["edges"] = edges;
    json cloud = json::array();
    for (const auto& v : cloud_) {
        json jv;
        jv["project_id"] = v.project_id;
        jv["name"] = v.name;
        jv["value"] = number_or_int(v.value);
        cloud.push_back(jv);
    }
    doc["cloud"] = cloud;
    return doc.dump(2) + "\n";
}

namespace {

void require_keys(const json& obj, const char* what,
                  std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
        if (!obj.contains(k))
            throw ValidationError(std::string("store ") + what + ": missing key \"" + k + "\"");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys) {
            if (it.key() == k) { known = true; break; }
        }
        if (!known)
            throw ValidationError(std::string("store ") + what + ": unknown key \"" +
                                  it.key() + "\"");
    }
}

}  // namespace

CommunityStore CommunityStore::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("store file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("store file: top level must be an object");
    require_keys(doc, "file", {"version", "users", "projects", "edges", "cloud"});
    if (!doc["version"].is_number_integer() || doc["version"].get<long long>() != 1)
        throw ValidationError("store file: unsupported version");

    CommunityStore store;
    long long max_seq = 0;
    for (const auto& ju : doc["users"]) {
        require_keys(ju, "user", {"username", "about", "country"});
        User u;
        u.username = ju["username"].get<std::string>();
        u.about = ju["about"].get<std::string>();
        u.country = ju["country"].get<std::string>();
        store.users_.push_back(std::move(u));
    }
    for (const auto& jp : doc["projects"]) {
        require_keys(jp, "project",
                     {"id", "author", "title", "description", "loves", "favorites",
                      "comments", "created_seq", "code"});
        Project p;
        p.id = jp["id"].get<long long>();
        p.author = jp["author"].get<std::string>();
        p.title = jp["title"].get<std::string>();
        p.description = jp["description"].get<std::string>();
        p.loves = jp["loves"].get<long long>();
        p.favorites = jp["favorites"].get<long long>();
        p.comments = jp["comments"].get<long long>();
        p.created_seq = jp["created_seq"].get<long long>();
        p.code = parse_program(jp["code"].dump());
        store.projects_.push_back(std::move(p));
    }
    for (const auto& je : doc["edges"]) {
        require_keys(je, "edge", {"kind", "source", "target", "seq"});
        RelationEdge e;
        std::string kind = je["kind"].get<std::string>();
        if (kind == "follow") {
            e.kind = EdgeKind::Follow;
            e.target_user = je["target"].get<std::string>();
        } else if (kind == "favorite") {
            e.kind = EdgeKind::Favorite;
            e.target_project = je["target"].get<long long>();
        } else {
            throw ValidationError("store edge: unknown kind \"" + kind + "\"");
        }
        e.source = je["source"].get<std::string>();
        e.seq = je["seq"].get<long long>();
        max_seq = std::max(max_seq, e.seq);
        store.edges_.push_back(std::move(e));
    }
    for (const auto& jv : doc["cloud"]) {
        require_keys(jv, "cloud var", {"project_id", "name", "value"});
        CloudVar v;
        v.project_id = jv["project_id"].get<long long>();
        v.name = jv["name"].get<std::string>();
        v.value = jv["value"].get<double>();
        store.cloud_.push_back(std::move(v));
    }
    store.next_edge_seq_ = max_seq + 1;
    store.validate();
    return store;
}

std::string CommunityStore::digest() const {
    return hex_digest(to_json());
}

void CommunityStore::validate() const {
    std::shared_lock lock(mutex_);
    for (std::size_t i = 0; i < users_.size(); ++i) {
        if (users_[i].username.empty()) throw ValidationError("user with empty username");
        for (std::size_t j = i + 1; j < users_.size(); ++j) {
            if (users_[i].username == users_[j].username)
                throw ValidationError("duplicate username: " + users_[i].username);
        }
    }
    auto user_exists = [&](const std::string& name) {
        return std::any_of(users_.begin(), users_.end(),
                           [&](const User& u) { return u.username == name; });
    };
    for (std::size_t i = 0; i < projects_.size(); ++i) {
        const Project& p = projects_[i];
        if (p.id <= 0) throw ValidationError("project id must be positive");
        if (!user_exists(p.author))
            throw ValidationError("project " + std::to_string(p.id) + ": unknown author " +
                                  p.author);
        if (p.loves < 0 || p.favorites < 0 || p.comments < 0)
            throw ValidationError("project " + std::to_string(p.id) + ": negative count");
        for (std::size_t j = i + 1; j < projects_.size(); ++j) {
            if (p.id == projects_[j].id)
                throw ValidationError("duplicate project id: " + std::to_string(p.id));
        }
    }
    auto project_exists = [&](long long id) {
        return std::any_of(projects_.begin(), projects_.end(),
                           [&](const Project& p) { return p.id == id; });
    };
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const RelationEdge& e = edges_[i];
        if (!user_exists(e.source))
            throw ValidationError("edge source unknown: " + e.source);
        if (e.kind == EdgeKind::Follow) {
            if (!user_exists(e.target_user))
                throw ValidationError("follow target unknown: " + e.target_user);
            if (e.source == e.target_user)
                throw ValidationError("self-follow: " + e.source);
        } else if (!project_exists(e.target_project)) {
            throw ValidationError("favorite target unknown: " +
                                  std::to_string(e.target_project));
        }
        for (std::size_t j = i + 1; j < edges_.size(); ++j) {
            const RelationEdge& f = edges_[j];
            if (e.kind == f.kind && e.source == f.source &&
                e.target_user == f.target_user && e.target_project == f.target_project)
                throw ValidationError("duplicate edge from " + e.source);
        }
    }
    for (const auto& v : cloud_) {
        if (!project_exists(v.project_id))
            throw ValidationError("cloud var on unknown project: " +
                                  std::to_string(v.project_id));
        if (!std::isfinite(v.value))
            throw ValidationError("cloud var " + v.name + " not finite");
    }
}

}  // namespace scb
