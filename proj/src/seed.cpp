#include "scb/seed.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "scb/build.hpp"

namespace scb {

using nlohmann::json;

long long Rng::poisson(double mean) {
    if (mean <= 0.0) return 0;
    double limit = std::exp(-mean);
    long long k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01();
    } while (p > limit);
    return k - 1;
}

void validate_seed_config(const SeedConfig& config) {
    auto bad = [](const std::string& field, const std::string& why) {
        throw ConfigError("seed config: field \"" + field + "\" " + why);
    };
    if (config.users < 1) bad("users", "must be >= 1");
    if (config.max_projects_per_user < 0) bad("max_projects_per_user", "must be >= 0");
    if (!(config.follow_prob >= 0.0 && config.follow_prob <= 1.0))
        bad("follow_prob", "must be in [0,1]");
    if (!(config.favorite_prob >= 0.0 && config.favorite_prob <= 1.0))
        bad("favorite_prob", "must be in [0,1]");
    if (!(config.love_mean >= 0.0) || !std::isfinite(config.love_mean))
        bad("love_mean", "must be a finite number >= 0");
    if (!(config.comment_mean >= 0.0) || !std::isfinite(config.comment_mean))
        bad("comment_mean", "must be a finite number >= 0");
    if (config.countries.empty()) bad("countries", "must be a nonempty list");
    for (const auto& c : config.countries)
        if (c.empty()) bad("countries", "must not contain empty names");
}

SeedConfig parse_seed_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("seed config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("seed config: top level must be an object");

    SeedConfig cfg;
    auto want_int = [&](const char* field, long long& out) {
        const json& v = doc[field];
        if (!v.is_number_integer())
            throw ConfigError(std::string("seed config: field \"") + field +
                              "\" must be an integer");
        out = v.get<long long>();
    };
    auto want_num = [&](const char* field, double& out) {
        const json& v = doc[field];
        if (!v.is_number())
            throw ConfigError(std::string("seed config: field \"") + field +
                              "\" must be a number");
        out = v.get<double>();
    };
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (key == "seed") want_int("seed", cfg.seed);
        else if (key == "users") want_int("users", cfg.users);
        else if (key == "max_projects_per_user")
            want_int("max_projects_per_user", cfg.max_projects_per_user);
        else if (key == "follow_prob") want_num("follow_prob", cfg.follow_prob);
        else if (key == "favorite_prob") want_num("favorite_prob", cfg.favorite_prob);
        else if (key == "love_mean") want_num("love_mean", cfg.love_mean);
        else if (key == "comment_mean") want_num("comment_mean", cfg.comment_mean);
        else if (key == "countries") {
            if (!it.value().is_array())
                throw ConfigError("seed config: field \"countries\" must be a list");
            cfg.countries.clear();
            for (const auto& c : it.value()) {
                if (!c.is_string())
                    throw ConfigError(
                        "seed config: field \"countries\" must contain strings");
                cfg.countries.push_back(c.get<std::string>());
            }
        } else {
            throw ConfigError("seed config: unknown field \"" + key + "\"");
        }
    }
    validate_seed_config(cfg);
    return cfg;
}

namespace {

const std::vector<std::string>& abouts() {
    static const std::vector<std::string> v = {
        "", "hello!", "I make games", "scratcher", "making stuff", "art and music"};
    return v;
}

const std::vector<std::string>& title_adjectives() {
    static const std::vector<std::string> v = {"Super", "Tiny",  "Lost",  "Happy",
                                               "Magic", "Pixel", "Brave", "Silent"};
    return v;
}

const std::vector<std::string>& title_nouns() {
    static const std::vector<std::string> v = {"Cat",    "Maze",   "Quest", "Racer",
                                               "Island", "Melody", "Robot", "Garden"};
    return v;
}

const std::vector<std::string>& descriptions() {
    static const std::vector<std::string> v = {
        "", "wip", "my first project", "use arrow keys", "remix welcome", "for fun"};
    return v;
}

const std::vector<std::string>& sounds() {
    static const std::vector<std::string> v = {"meow", "pop", "boing"};
    return v;
}

std::string pick(Rng& rng, const std::vector<std::string>& pool) {
    return pool[static_cast<std::size_t>(rng.below(pool.size()))];
}

Bld gen_simple_statement(Rng& rng) {
    switch (rng.below(6)) {
        case 0: return Bld("say").a(pick(rng, {"hi!", "welcome", "watch this", "score!"}));
        case 1: return Bld("think").a(pick(rng, {"hmm", "...", "ok"}));
        case 2: return Bld("play_sound").f("sound", pick(rng, sounds()));
        case 3: return Bld("pen_down");
        case 4: return Bld("pen_move").a(static_cast<double>(1 + rng.below(10)));
        default: return Bld("wait").a(0.1 * static_cast<double>(1 + rng.below(5)));
    }
}

std::vector<Bld> gen_statements(Rng& rng, int depth) {
    std::vector<Bld> out;
    auto count = 1 + rng.below(3);
    for (std::uint64_t i = 0; i < count; ++i) {
        // Occasionally nest a control block so the control category shows up.
        if (depth > 0 && rng.below(4) == 0) {
            Bld loop = Bld("repeat").a(static_cast<double>(2 + rng.below(4)));
            loop.body(gen_statements(rng, depth - 1));
            out.push_back(loop);
        } else if (depth > 0 && rng.below(8) == 0) {
            Bld branch = Bld("if").a(Bld("gt").a(static_cast<double>(rng.below(10))).a(5.0));
            branch.body(gen_statements(rng, depth - 1));
            out.push_back(branch);
        } else {
            out.push_back(gen_simple_statement(rng));
        }
    }
    return out;
}

Program gen_project_code(Rng& rng) {
    std::vector<Script> scripts;
    scripts.push_back(flag_script(gen_statements(rng, 1)));
    if (rng.below(3) == 0) {
        scripts.push_back(make_script(Bld("whenkeypressed").f("key", "space"),
                                      gen_statements(rng, 0)));
    }
    return one_sprite_program(make_sprite("Sprite1", std::move(scripts)));
}

std::string username_for(long long index, long long total) {
    int width = 2;
    for (long long n = total; n >= 100; n /= 10) ++width;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "user%0*lld", width, index + 1);
    return buf;
}

}  // namespace

CommunityStore load_seed(const SeedConfig& config) {
    validate_seed_config(config);
    Rng rng(static_cast<std::uint64_t>(config.seed));

    std::vector<User> users;
    for (long long i = 0; i < config.users; ++i) {
        User u;
        u.username = username_for(i, config.users);
        u.about = pick(rng, abouts());
        u.country = pick(rng, config.countries);
        users.push_back(std::move(u));
    }

    std::vector<Project> projects;
    long long next_id = 1;
    for (const auto& u : users) {
        auto n = config.max_projects_per_user > 0
                     ? rng.below(static_cast<std::uint64_t>(config.max_projects_per_user) + 1)
                     : 0;
        for (std::uint64_t k = 0; k < n; ++k) {
            Project p;
            p.id = next_id++;
            p.created_seq = p.id;
            p.author = u.username;
            p.title = pick(rng, title_adjectives()) + " " + pick(rng, title_nouns());
            p.description = pick(rng, descriptions());
            p.loves = rng.poisson(config.love_mean);
            p.comments = rng.poisson(config.comment_mean);
            p.code = gen_project_code(rng);
            projects.push_back(std::move(p));
        }
    }

    struct Pair {
        std::string source;
        std::string target_user;
        long long target_project = 0;
    };
    std::vector<Pair> follows;
    for (const auto& a : users) {
        for (const auto& b : users) {
            if (a.username == b.username) continue;
            if (rng.bernoulli(config.follow_prob))
                follows.push_back({a.username, b.username, 0});
        }
    }
    std::vector<Pair> favorites;
    for (const auto& u : users) {
        for (const auto& p : projects) {
            if (rng.bernoulli(config.favorite_prob))
                favorites.push_back({u.username, "", p.id});
        }
    }

    // favorites_count mirrors the favorite edges exactly in seeded stores.
    for (auto& p : projects) {
        p.favorites = 0;
        for (const auto& f : favorites)
            if (f.target_project == p.id) ++p.favorites;
    }

    CommunityStore store;
    for (auto& u : users) store.add_user(std::move(u));
    for (auto& p : projects) store.add_project(std::move(p));
    for (const auto& f : follows) store.add_follow(f.source, f.target_user);
    for (const auto& f : favorites) store.add_favorite(f.source, f.target_project);
    store.validate();
    return store;
}

}  // namespace scb
