#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "scb/build.hpp"
#include "scb/fixture.hpp"
#include "scb/interp.hpp"
#include "scb/service.hpp"

using namespace scb;

namespace {

// In-process service over a private S0 copy, one session.
struct Rig {
    CommunityStore store = make_s0();
    ServiceCore core{store, 20};
    Session session{std::make_shared<InProcessTransport>(core)};

    Transcript run(const Program& program, RunOptions options = {}) {
        if (options.viewer.empty()) options.viewer = "alice";
        return run_program(program, options, session);
    }
};

Program single_flag(std::vector<Bld> body,
                    std::vector<VariableDecl> vars = {{"v", false, 0.0}}) {
    return one_sprite_program(
        make_sprite("S", {flag_script(std::move(body))}, std::move(vars)));
}

std::vector<std::string> says(const Transcript& t) {
    std::vector<std::string> out;
    for (const auto& e : t.events)
        if (e.kind == EventKind::Say) out.push_back(e.payload);
    return out;
}

std::vector<std::string> diags(const Transcript& t) {
    std::vector<std::string> out;
    for (const auto& e : t.events)
        if (e.kind == EventKind::Diag) out.push_back(e.payload);
    return out;
}

}  // namespace

TEST_CASE("say and think render display values") {
    Rig rig;
    auto t = rig.run(single_flag({Bld("say").a(Bld("add").a(1).a(2)),
                                  Bld("think").a(true),
                                  Bld("say").a(Bld("div").a(1).a(3))}));
    REQUIRE(t.events.size() == 3);
    CHECK(t.events[0].kind == EventKind::Say);
    CHECK(t.events[0].payload == "3");
    CHECK(t.events[0].tick == 0);
    CHECK(t.events[1].kind == EventKind::Think);
    CHECK(t.events[1].payload == "true");
    CHECK(t.events[2].payload == "0.3333333333333333");
    CHECK(t.end_tick == 0);
    CHECK(!t.max_ticks_hit);
}

TEST_CASE("operator semantics through the vm") {
    Rig rig;
    auto t = rig.run(single_flag({
        Bld("say").a(Bld("mod").a(-7).a(3)),         // floored: 2
        Bld("say").a(Bld("mod").a(7).a(-3)),         // floored: -2
        Bld("say").a(Bld("round").a(2.5)),           // 3
        Bld("say").a(Bld("round").a(-2.5)),          // -2 (floor(x+0.5))
        Bld("say").a(Bld("div").a(1).a(0)),          // Infinity
        Bld("say").a(Bld("eq").a("Hello").a("hello")),
        Bld("say").a(Bld("gt").a("10").a(9)),
        Bld("say").a(Bld("join").a("n=").a(4.5)),
        Bld("say").a(Bld("length_of").a("doughnut")),
        Bld("say").a(Bld("not").a(false)),
    }));
    CHECK(says(t) == std::vector<std::string>{"2", "-2", "3", "-2", "Infinity", "true",
                                              "true", "n=4.5", "8", "true"});
}

TEST_CASE("wait blocks in 30-tick seconds") {
    Rig rig;
    auto t = rig.run(single_flag({Bld("say").a("a"), Bld("wait").a(1),
                                  Bld("say").a("b"), Bld("wait").a(0.01),
                                  Bld("say").a("c")}));
    REQUIRE(t.events.size() == 3);
    CHECK(t.events[0].tick == 0);
    CHECK(t.events[1].tick == 30);  // 1s = 30 ticks
    CHECK(t.events[2].tick == 31);  // sub-tick waits round up to one tick
    CHECK(t.end_tick == 31);
}

TEST_CASE("repeat uses scratch rounding and clamping") {
    Rig rig;
    auto t = rig.run(single_flag({[&] {
        Bld rep("repeat");
        rep.a(2.5);  // floor(2.5 + 0.5) = 3
        rep.body({Bld("say").a("x")});
        return rep;
    }()}));
    CHECK(says(t).size() == 3);

    auto t0 = rig.run(single_flag({[&] {
        Bld rep("repeat");
        rep.a(0);
        rep.body({Bld("say").a("x")});
        return rep;
    }()}));
    CHECK(says(t0).empty());

    auto tn = rig.run(single_flag({[&] {
        Bld rep("repeat");
        rep.a(-3);
        rep.body({Bld("say").a("x")});
        return rep;
    }()}));
    CHECK(says(tn).empty());

    auto ts = rig.run(single_flag({[&] {
        Bld rep("repeat");
        rep.a("2");  // strings coerce
        rep.body({Bld("say").a("x")});
        return rep;
    }()}));
    CHECK(says(ts).size() == 2);
}

TEST_CASE("loop iterations yield one tick each") {
    Rig rig;
    Bld rep("repeat");
    rep.a(3);
    rep.body({Bld("say").a("x")});
    auto t = rig.run(single_flag({rep}));
    REQUIRE(t.events.size() == 3);
    CHECK(t.events[0].tick == 0);
    CHECK(t.events[1].tick == 1);
    CHECK(t.events[2].tick == 2);
}

TEST_CASE("forever runs until the tick cap") {
    Rig rig;
    Bld fv("forever");
    fv.body({Bld("change_var").f("name", "v").a(1)});
    RunOptions opt;
    opt.max_ticks = 10;
    auto t = rig.run(single_flag({fv}), opt);
    CHECK(t.max_ticks_hit);
    CHECK(t.end_tick == 10);
    REQUIRE(t.vars.size() == 1);
    CHECK(t.vars[0].value == Value(10.0));
}

TEST_CASE("if and if_else branch on truthiness") {
    Rig rig;
    Bld yes("if");
    yes.a("yes");
    yes.body({Bld("say").a("then")});
    Bld zero("if");
    zero.a("0");  // "0" is false
    zero.body({Bld("say").a("never")});
    Bld either("if_else");
    either.a(false);
    either.body({Bld("say").a("t")});
    either.els({Bld("say").a("f")});
    auto t = rig.run(single_flag({yes, zero, either}));
    CHECK(says(t) == std::vector<std::string>{"then", "f"});
}

TEST_CASE("stop ends only its own script") {
    CommunityStore store = make_s0();
    ServiceCore core{store, 20};
    Session session{std::make_shared<InProcessTransport>(core)};

    Program p;
    p.sprites.push_back(make_sprite(
        "A", {flag_script({Bld("say").a("a1"), Bld("stop"), Bld("say").a("a2")})}, {}));
    Bld rep("repeat");
    rep.a(2);
    rep.body({Bld("say").a("b")});
    p.sprites.push_back(make_sprite("B", {flag_script({rep})}, {}));

    RunOptions opt;
    opt.viewer = "alice";
    auto t = run_program(p, opt, session);
    std::vector<std::pair<std::string, std::string>> got;
    for (const auto& e : t.events) got.emplace_back(e.sprite, e.payload);
    CHECK(got == std::vector<std::pair<std::string, std::string>>{
                     {"A", "a1"}, {"B", "b"}, {"B", "b"}});
}

TEST_CASE("sprites share each tick round-robin in document order") {
    CommunityStore store = make_s0();
    ServiceCore core{store, 20};
    Session session{std::make_shared<InProcessTransport>(core)};

    Program p;
    for (const char* name : {"A", "B"}) {
        Bld rep("repeat");
        rep.a(2);
        rep.body({Bld("say").a(name)});
        p.sprites.push_back(make_sprite(name, {flag_script({rep})}, {}));
    }
    RunOptions opt;
    opt.viewer = "alice";
    auto t = run_program(p, opt, session);
    std::vector<std::string> order;
    for (const auto& e : t.events)
        order.push_back(e.sprite + "@" + std::to_string(e.tick));
    CHECK(order == std::vector<std::string>{"A@0", "B@0", "A@1", "B@1"});
}

TEST_CASE("events start and restart scripts") {
    Rig rig;
    Program p = one_sprite_program(make_sprite(
        "S",
        {make_script(Bld("whenkeypressed").f("key", "space"), {Bld("say").a("hit")})},
        {}));

    SUBCASE("no matching event, no output") {
        auto t = rig.run(p);  // default flag event only
        CHECK(t.events.empty());
        CHECK(t.end_tick == 0);
    }
    SUBCASE("key events fire at their ticks, restarting after completion") {
        RunOptions opt;
        opt.events = {{2, "space"}, {5, "space"}};
        auto t = rig.run(p, opt);
        REQUIRE(says(t).size() == 2);
        CHECK(t.events[0].tick == 2);
        CHECK(t.events[1].tick == 5);
    }
    SUBCASE("events aimed at a running script are dropped") {
        Program slow = one_sprite_program(make_sprite(
            "S",
            {make_script(Bld("whenkeypressed").f("key", "space"),
                         {Bld("say").a("go"), Bld("wait").a(1), Bld("say").a("end")})},
            {}));
        RunOptions opt;
        opt.events = {{0, "space"}, {3, "space"}};
        auto t = rig.run(slow, opt);
        CHECK(says(t) == std::vector<std::string>{"go", "end"});
    }
    SUBCASE("wrong key does nothing") {
        RunOptions opt;
        opt.events = {{0, "enter"}};
        auto t = rig.run(p, opt);
        CHECK(t.events.empty());
    }
}

TEST_CASE("flag restart resumes a finished script but keeps variables") {
    Rig rig;
    auto program = single_flag({Bld("change_var").f("name", "v").a(1),
                                Bld("say").a(Bld("var").f("name", "v"))});
    RunOptions opt;
    opt.events = {{0, ""}, {4, ""}};
    auto t = rig.run(program, opt);
    CHECK(says(t) == std::vector<std::string>{"1", "2"});
    CHECK(t.vars[0].value == Value(2.0));
}

TEST_CASE("ask consumes queued answers and diagnoses exhaustion") {
    Rig rig;
    auto program = single_flag({Bld("ask").a("first?"), Bld("say").a(Bld("answer")),
                                Bld("ask").a("second?"), Bld("say").a(Bld("answer"))});
    RunOptions opt;
    opt.answers = {"one"};
    auto t = rig.run(program, opt);
    CHECK(says(t) == std::vector<std::string>{"one", ""});
    REQUIRE(diags(t).size() == 1);
    CHECK(diags(t)[0] == "answer queue exhausted");
    // asks resume on the next tick
    REQUIRE(t.events.size() >= 4);
    CHECK(t.events[0].kind == EventKind::Ask);
    CHECK(t.events[0].tick == 0);
    CHECK(t.events[1].tick == 1);
}

TEST_CASE("variables set, change and coerce") {
    Rig rig;
    auto t = rig.run(single_flag({Bld("set_var").f("name", "v").a("3.5"),
                                  Bld("change_var").f("name", "v").a(1),
                                  Bld("say").a(Bld("var").f("name", "v")),
                                  Bld("set_var").f("name", "v").a("word"),
                                  Bld("change_var").f("name", "v").a(2),
                                  Bld("say").a(Bld("var").f("name", "v"))}));
    CHECK(says(t) == std::vector<std::string>{"4.5", "2"});
}

TEST_CASE("max_ticks must be positive") {
    Rig rig;
    RunOptions opt;
    opt.max_ticks = 0;
    CHECK_THROWS_AS(rig.run(single_flag({Bld("say").a("x")}), opt), ConfigError);
}

TEST_CASE("unknown viewer fails before any execution") {
    Rig rig;
    RunOptions opt;
    opt.viewer = "nobody";
    CHECK_THROWS_AS(rig.run(single_flag({Bld("say").a("x")}), opt), NotFoundError);
}

TEST_CASE("fetch blocks cost one latency window and cache after") {
    Rig rig;
    rig.session.set_latency_ticks(3);
    auto program = single_flag(
        {Bld("say").a(Bld("comm_total").f("kind", "projects")),
         Bld("say").a(Bld("comm_total").f("kind", "users"))});
    auto t = rig.run(program);
    REQUIRE(says(t).size() == 2);
    CHECK(says(t) == std::vector<std::string>{"3", "3"});
    CHECK(t.events[0].tick == 3);  // blocked T0..T2 on /api/stats
    CHECK(t.events[1].tick == 3);  // second read hits the cache, same tick
}

TEST_CASE("blocked fetches do not stall other scripts") {
    CommunityStore store = make_s0();
    ServiceCore core{store, 20};
    Session session{std::make_shared<InProcessTransport>(core)};
    session.set_latency_ticks(5);

    Program p;
    Bld tick_loop("repeat");
    tick_loop.a(8);
    tick_loop.body({Bld("change_var").f("name", "t").a(1),
                    Bld("say").a(Bld("var").f("name", "t"))});
    p.sprites.push_back(
        make_sprite("Ticker", {flag_script({tick_loop})}, {{"t", false, 0.0}}));
    Bld each("comm_foreach");
    each.f("relation", "shared");
    each.a(Bld("comm_viewer_username"));
    each.body({Bld("say").a(Bld("comm_project_meta").f("field", "title"))});
    p.sprites.push_back(make_sprite("Fetcher", {flag_script({each})}, {}));

    RunOptions opt;
    opt.viewer = "alice";
    auto t = run_program(p, opt, session);

    int ticker_before_first_fetch = 0;
    bool fetch_seen = false;
    long long first_fetch_tick = -1;
    for (const auto& e : t.events) {
        if (e.kind != EventKind::Say) continue;
        if (e.sprite == "Fetcher" && !fetch_seen) {
            fetch_seen = true;
            first_fetch_tick = e.tick;
        }
        if (e.sprite == "Ticker" && !fetch_seen) ++ticker_before_first_fetch;
    }
    REQUIRE(fetch_seen);
    CHECK(first_fetch_tick == 5);
    CHECK(ticker_before_first_fetch >= 5);
}

TEST_CASE("unknown foreach user diagnoses and moves on") {
    Rig rig;
    Bld each("comm_foreach");
    each.f("relation", "shared");
    each.a("dave");
    each.body({Bld("say").a("never")});
    auto t = rig.run(single_flag({each, Bld("say").a("done")}));
    CHECK(says(t) == std::vector<std::string>{"done"});
    REQUIRE(diags(t).size() == 1);
    CHECK(diags(t)[0] == "unknown user: dave");
}

TEST_CASE("out-of-context accessors diagnose once per site and yield neutrals") {
    Rig rig;
    Bld rep("repeat");
    rep.a(3);
    rep.body({Bld("say").a(Bld("comm_user_meta").f("field", "country"))});
    auto t = rig.run(single_flag({rep}));
    CHECK(says(t) == std::vector<std::string>{"", "", ""});
    CHECK(diags(t).size() == 1);  // per-site dedupe
    CHECK(diags(t)[0].rfind("L1 out-of-context comm_user_meta at ", 0) == 0);

    auto t2 = rig.run(single_flag(
        {Bld("say").a(Bld("comm_project_meta").f("field", "loves")),
         Bld("say").a(Bld("comm_project_uses_category").f("category", "sound")),
         Bld("say").a(Bld("comm_project_block_count").f("opcode", "say"))}));
    CHECK(says(t2) == std::vector<std::string>{"0", "false", "0"});
    CHECK(diags(t2).size() == 3);
}

TEST_CASE("cloud variables write through and read live") {
    Rig rig;
    Program p = one_sprite_program(make_sprite(
        "S",
        {flag_script({Bld("set_var").f("name", "n").a(5),
                      Bld("change_var").f("name", "n").a(2.5),
                      Bld("say").a(Bld("var").f("name", "n"))})},
        {{"n", true, 0.0}}));
    p.cloud_project_id = 1;
    auto t = rig.run(p);
    CHECK(says(t) == std::vector<std::string>{"7.5"});
    CHECK(rig.store.cloud_read(1, "n") == 7.5);
    REQUIRE(t.vars.size() == 1);
    CHECK(t.vars[0].value == Value(7.5));  // monitor reads live server state
}

TEST_CASE("cloud writes against a missing project diagnose and continue") {
    Rig rig;
    Program p = one_sprite_program(make_sprite(
        "S", {flag_script({Bld("set_var").f("name", "n").a(1), Bld("say").a("after")})},
        {{"n", true, 0.0}}));
    p.cloud_project_id = 99;
    auto t = rig.run(p);
    CHECK(says(t) == std::vector<std::string>{"after"});
    REQUIRE(!diags(t).empty());
    CHECK(diags(t)[0] == "unknown cloud project: 99");
}

TEST_CASE("non-finite cloud writes are skipped with a diagnostic") {
    Rig rig;
    Program p = one_sprite_program(make_sprite(
        "S",
        {flag_script({Bld("set_var").f("name", "n").a(3),
                      Bld("change_var").f("name", "n").a(Bld("div").a(1).a(0))})},
        {{"n", true, 0.0}}));
    p.cloud_project_id = 1;
    auto t = rig.run(p);
    CHECK(diags(t) == std::vector<std::string>{"cloud write skipped: non-finite value"});
    CHECK(rig.store.cloud_read(1, "n") == 3.0);
}

TEST_CASE("transcripts are deterministic") {
    auto once = [] {
        Rig rig;
        Bld each("comm_foreach");
        each.f("relation", "followers");
        each.a(Bld("comm_viewer_username"));
        each.body({Bld("say").a(Bld("comm_user_meta").f("field", "username")),
                   Bld("wait").a(0.05)});
        auto t = rig.run(single_flag({each}));
        return t.to_text();
    };
    std::string first = once();
    for (int i = 0; i < 5; ++i) CHECK(once() == first);
}

TEST_CASE("transcript grammar") {
    Rig rig;
    auto t = rig.run(single_flag({Bld("say").a("he said \"hi\"\n"),
                                  Bld("set_var").f("name", "v").a(2.5)}));
    std::string text = t.to_text();
    CHECK(text ==
          "T0 S SAY \"he said \\\"hi\\\"\\n\"\n"
          "VAR S.v=2.5\n"
          "END tick=0 reason=done\n");
}
