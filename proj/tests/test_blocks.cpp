#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <memory>

#include "oracle_support.hpp"
#include "scb/build.hpp"
#include "scb/codemeta.hpp"
#include "scb/examples_gen.hpp"
#include "scb/fixture.hpp"
#include "scb/interp.hpp"
#include "scb/seed.hpp"
#include "scb/service.hpp"

using json = nlohmann::json;
using namespace scb;

namespace {

struct Rig {
    CommunityStore store;
    ServiceCore core;
    Session session;
    json raw;

    explicit Rig(CommunityStore s = make_s0())
        : store(std::move(s)),
          core(store, 20),
          session(std::make_shared<InProcessTransport>(core)),
          raw(json::parse(store.to_json())) {}

    Transcript run(const std::string& example, const std::string& viewer,
                   RunOptions opt = {}) {
        opt.viewer = viewer;
        return run_program(example_program(example), opt, session);
    }
};

std::vector<std::string> says(const Transcript& t) {
    std::vector<std::string> out;
    for (const auto& e : t.events)
        if (e.kind == EventKind::Say) out.push_back(e.payload);
    return out;
}

RunOptions with_answers(std::vector<std::string> answers) {
    RunOptions opt;
    for (auto& a : answers) opt.answers.push_back(std::move(a));
    return opt;
}

RunOptions key_space_at(long long tick) {
    RunOptions opt;
    opt.events = {{tick, "space"}};
    return opt;
}

}  // namespace

TEST_CASE("project_titles: titles of the asked user's shared projects") {
    Rig rig;
    for (const char* who : {"alice", "bob", "carol"}) {
        auto opt = key_space_at(1);
        opt.answers = {who};
        auto t = rig.run("project_titles", "alice", opt);
        CHECK(says(t) == oracle::project_titles_says(rig.raw, who));
    }
    CHECK(oracle::project_titles_says(rig.raw, "alice") ==
          std::vector<std::string>{"Cat Maze", "Pong"});
}

TEST_CASE("project_titles with an unknown user diagnoses and says nothing") {
    Rig rig;
    auto opt = key_space_at(1);
    opt.answers = {"dave"};
    auto t = rig.run("project_titles", "alice", opt);
    CHECK(says(t).empty());
    bool diagnosed = false;
    for (const auto& e : t.events)
        if (e.kind == EventKind::Diag && e.payload == "unknown user: dave")
            diagnosed = true;
    CHECK(diagnosed);
}

TEST_CASE("spain_followers: follower names filtered by country") {
    Rig rig;
    for (const char* who : {"alice", "bob", "carol"}) {
        auto t = rig.run("spain_followers", "alice", with_answers({who}));
        CHECK(says(t) == oracle::spain_follower_says(rig.raw, who));
    }
    CHECK(oracle::spain_follower_says(rig.raw, "alice") ==
          std::vector<std::string>{"carol"});
}

TEST_CASE("my_sound_projects: own shared projects using sound") {
    Rig rig;
    for (const char* viewer : {"alice", "bob", "carol"}) {
        auto t = rig.run("my_sound_projects", viewer);
        CHECK(says(t) == oracle::sound_project_says(rig.raw, viewer));
    }
    CHECK(oracle::sound_project_says(rig.raw, "alice") ==
          std::vector<std::string>{"Cat Maze"});
}

TEST_CASE("sound_recommender: favorites of followed users, sound only") {
    Rig rig;
    for (const char* viewer : {"alice", "bob", "carol"}) {
        auto t = rig.run("sound_recommender", viewer);
        CHECK(says(t) == oracle::recommender_says(rig.raw, viewer));
    }
    CHECK(oracle::recommender_says(rig.raw, "alice") ==
          std::vector<std::string>{"Cat Maze"});
}

TEST_CASE("talkative: S0/alice scores 27") {
    Rig rig;
    for (const char* viewer : {"alice", "bob", "carol"}) {
        auto t = rig.run("talkative", viewer);
        auto said = says(t);
        REQUIRE(said.size() == 1);
        CHECK(said[0] == oracle::talkative_say(rig.raw, viewer));
    }
    CHECK(oracle::talkative_say(rig.raw, "alice") == "talkative score: 27");
}

TEST_CASE("doughnut_data: category fractions over the asked user's projects") {
    Rig rig;
    for (const char* who : {"alice", "bob", "carol"}) {
        auto t = rig.run("doughnut_data", "alice", with_answers({who}));
        CHECK(says(t) == oracle::doughnut_says(rig.raw, who));
    }
    auto alice = oracle::doughnut_says(rig.raw, "alice");
    CHECK(alice == std::vector<std::string>{"looks: 0.75", "sound: 0.25"});

    // fractions must sum to exactly 1
    double sum = 0;
    for (const auto& line : alice) sum += std::stod(line.substr(line.find(": ") + 2));
    CHECK(sum == 1.0);
}

TEST_CASE("loveits_vs_favorites accumulates cloud totals across viewers") {
    Rig rig;
    for (const char* viewer : {"alice", "bob", "carol"}) rig.run("loveits_vs_favorites", viewer);
    auto [loves, favorites] = oracle::loveits_totals(rig.raw, {"alice", "bob", "carol"});
    CHECK(rig.store.cloud_read(1, "total loves") == double(loves));
    CHECK(rig.store.cloud_read(1, "total favorites") == double(favorites));
    CHECK(loves == 4);
    CHECK(favorites == 7);
}

TEST_CASE("examples behave the same on a seeded store") {
    CommunityStore seeded = load_seed(SeedConfig{});  // seed 42
    Rig rig(seeded);
    std::vector<std::string> users;
    for (size_t i = 0; i < rig.store.users().size(); i += 17)
        users.push_back(rig.store.users()[i].username);

    for (const auto& who : users) {
        {
            auto opt = key_space_at(1);
            opt.answers = {who};
            CHECK(says(rig.run("project_titles", users[0], opt)) == oracle::project_titles_says(rig.raw, who));
        }
        CHECK(says(rig.run("spain_followers", users[0], with_answers({who}))) ==
              oracle::spain_follower_says(rig.raw, who));
        CHECK(says(rig.run("my_sound_projects", who)) ==
              oracle::sound_project_says(rig.raw, who));
        CHECK(says(rig.run("sound_recommender", who)) ==
              oracle::recommender_says(rig.raw, who));
        auto talkative = says(rig.run("talkative", who));
        REQUIRE(talkative.size() == 1);
        CHECK(talkative[0] == oracle::talkative_say(rig.raw, who));
        CHECK(says(rig.run("doughnut_data", who, with_answers({who}))) ==
              oracle::doughnut_says(rig.raw, who));
    }
}

TEST_CASE("project accessors read every field") {
    Rig rig;
    Bld each("comm_foreach");
    each.f("relation", "shared");
    each.a("alice");
    std::vector<Bld> body;
    for (const char* field : {"title", "description", "loves", "favorites", "comments"})
        body.push_back(Bld("say").a(Bld("comm_project_meta").f("field", field)));
    each.body(body);
    Program p = one_sprite_program(make_sprite("S", {flag_script({each})}, {}));
    RunOptions opt;
    opt.viewer = "alice";
    auto t = run_program(p, opt, rig.session);
    CHECK(says(t) == std::vector<std::string>{
                         "Cat Maze", "fun maze", "3", "2", "1",  // project 1
                         "Pong", "", "1", "5", "0",              // project 2
                     });
}

TEST_CASE("user accessors read every field") {
    Rig rig;
    Bld each("comm_foreach");
    each.f("relation", "followers");
    each.a("alice");
    std::vector<Bld> body;
    for (const char* field : {"username", "about", "country"})
        body.push_back(Bld("say").a(Bld("comm_user_meta").f("field", field)));
    each.body(body);
    Program p = one_sprite_program(make_sprite("S", {flag_script({each})}, {}));
    RunOptions opt;
    opt.viewer = "alice";
    auto t = run_program(p, opt, rig.session);
    CHECK(says(t) == std::vector<std::string>{"bob", "", "USA", "carol", "artist",
                                              "Spain"});
}

TEST_CASE("comm_total reads all three counters") {
    Rig rig;
    std::vector<Bld> body;
    for (const char* kind : {"projects", "users", "comments"})
        body.push_back(Bld("say").a(Bld("comm_total").f("kind", kind)));
    Program p = one_sprite_program(make_sprite("S", {flag_script(body)}, {}));
    RunOptions opt;
    opt.viewer = "alice";
    auto t = run_program(p, opt, rig.session);
    CHECK(says(t) == std::vector<std::string>{"3", "3", "5"});
}

TEST_CASE("uses_category and block_count agree with a raw-json count") {
    Rig rig;
    for (long long id : {1, 2, 3}) {
        const json* pj = oracle::find_project(rig.raw, id);
        REQUIRE(pj != nullptr);
        auto counts = oracle::opcode_counts(pj->at("code"));
        auto cats = oracle::categories(pj->at("code"));

        const Project& project = rig.store.project(id);
        CodeMeta meta = code_metadata(project.code);
        for (const auto& [op, n] : counts) CHECK(meta.opcode_counts.at(op) == n);
        CHECK((long long)meta.opcode_counts.size() == (long long)counts.size());
        std::set<std::string> got(meta.categories.begin(), meta.categories.end());
        CHECK(got == cats);
    }
}

TEST_CASE("viewer username block reports the run identity") {
    Rig rig;
    Program p = one_sprite_program(make_sprite(
        "S", {flag_script({Bld("say").a(Bld("comm_viewer_username"))})}, {}));
    RunOptions opt;
    opt.viewer = "carol";
    auto t = run_program(p, opt, rig.session);
    CHECK(says(t) == std::vector<std::string>{"carol"});
}

TEST_CASE("seeded stores: code metadata matches the raw-json oracle everywhere") {
    CommunityStore seeded = load_seed(SeedConfig{});
    json raw = json::parse(seeded.to_json());
    REQUIRE(!seeded.projects().empty());
    for (const auto& project : seeded.projects()) {
        const json* pj = oracle::find_project(raw, project.id);
        auto counts = oracle::opcode_counts(pj->at("code"));
        CodeMeta meta = code_metadata(project.code);
        CAPTURE(project.id);
        CHECK(meta.opcode_counts == counts);
        std::set<std::string> got(meta.categories.begin(), meta.categories.end());
        CHECK(got == oracle::categories(pj->at("code")));
    }
}
