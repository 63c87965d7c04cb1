#include "scb/examples_gen.hpp"

#include "scb/build.hpp"

namespace scb {

namespace {

Bld project_meta(const char* field) { return Bld("comm_project_meta").f("field", field); }
Bld user_meta(const char* field) { return Bld("comm_user_meta").f("field", field); }
Bld viewer() { return Bld("comm_viewer_username"); }
Bld var_of(const char* name) { return Bld("var").f("name", name); }

Bld foreach_loop(const char* relation, const Bld& username, const std::vector<Bld>& body) {
    return Bld("comm_foreach").f("relation", relation).a(username).body(body);
}

// Asks for a username, then announces each of that user's shared project
// titles; the prompt keeps the same program useful against any store.
Program project_titles() {
    return one_sprite_program(make_sprite(
        "Sprite1",
        {make_script(Bld("whenkeypressed").f("key", "space"),
                     {
                         Bld("ask").a("whose projects?"),
                         foreach_loop("shared", Bld("answer"),
                                      {Bld("say").a(project_meta("title"))}),
                     })}));
}

// Which of a user's followers are from Spain?
Program spain_followers() {
    return one_sprite_program(make_sprite(
        "Sprite1",
        {flag_script({
            Bld("ask").a("which user?"),
            foreach_loop("followers", Bld("answer"),
                         {Bld("if")
                              .a(Bld("eq").a(user_meta("country")).a("Spain"))
                              .body({Bld("say").a(user_meta("username"))})}),
        })}));
}

// Titles of the viewer's own projects that use sound blocks.
Program my_sound_projects() {
    return one_sprite_program(make_sprite(
        "Sprite1",
        {flag_script({
            foreach_loop("shared", viewer(),
                         {Bld("if")
                              .a(Bld("comm_project_uses_category").f("category", "sound"))
                              .body({Bld("say").a(project_meta("title"))})}),
        })}));
}

// Socially curated: titles of sound projects favorited by people the viewer
// follows.
Program sound_recommender() {
    return one_sprite_program(make_sprite(
        "Sprite1",
        {flag_script({
            foreach_loop(
                "following", viewer(),
                {foreach_loop(
                    "favorited", user_meta("username"),
                    {Bld("if")
                         .a(Bld("comm_project_uses_category").f("category", "sound"))
                         .body({Bld("say").a(project_meta("title"))})})}),
        })}));
}

// Talkativeness: total length of shared titles+descriptions, plus the
// viewer's username and about-me lengths. There is no block that reads the
// viewer's own profile directly, so the about-me text is picked up from the
// one user frame guaranteed to be the viewer: any follower of the viewer has
// the viewer in their following list.
Program talkative() {
    Bld count_about =
        Bld("if")
            .a(Bld("and")
                   .a(Bld("eq").a(user_meta("username")).a(viewer()))
                   .a(Bld("eq").a(var_of("counted")).a(0)))
            .body({
                Bld("change_var").f("name", "score").a(Bld("length_of").a(user_meta("about"))),
                Bld("set_var").f("name", "counted").a(1),
            });
    return one_sprite_program(make_sprite(
        "Analyzer",
        {flag_script({
            Bld("set_var").f("name", "score").a(0),
            Bld("set_var").f("name", "counted").a(0),
            foreach_loop("shared", viewer(),
                         {Bld("change_var")
                              .f("name", "score")
                              .a(Bld("length_of")
                                     .a(Bld("join")
                                            .a(project_meta("title"))
                                            .a(project_meta("description"))))}),
            Bld("change_var").f("name", "score").a(Bld("length_of").a(viewer())),
            foreach_loop("followers", viewer(),
                         {foreach_loop("following", user_meta("username"), {count_about})}),
            Bld("say").a(Bld("join").a("talkative score: ").a(var_of("score"))),
        })},
        {{"score", false, 0.0}, {"counted", false, 0.0}}));
}

// Doughnut-chart data: per-category fractions of all blocks used across a
// prompted user's shared projects, normalized so the fractions sum to 1.
Program doughnut_data() {
    static const std::vector<std::string> categories = {
        "looks", "control", "data", "sensing", "sound", "pen", "operators", "community"};

    auto category_chain = [](const std::string& category) {
        std::vector<std::string> ops;
        for (const auto& info : opcode_table())
            if (info.category == category && info.shape != BlockShape::Hat)
                ops.push_back(info.op);
        Bld chain = Bld("comm_project_block_count").f("opcode", ops[0]);
        for (std::size_t i = 1; i < ops.size(); ++i)
            chain = Bld("add").a(chain).a(
                Bld("comm_project_block_count").f("opcode", ops[i]));
        return chain;
    };

    std::vector<Bld> body;
    body.push_back(Bld("ask").a("which user?"));
    for (const auto& c : categories) body.push_back(Bld("set_var").f("name", c.c_str()).a(0));
    body.push_back(Bld("set_var").f("name", "total").a(0));

    std::vector<Bld> loop_body;
    for (const auto& c : categories)
        loop_body.push_back(Bld("change_var").f("name", c.c_str()).a(category_chain(c)));
    body.push_back(foreach_loop("shared", Bld("answer"), loop_body));

    Bld total_chain = var_of(categories[0].c_str());
    for (std::size_t i = 1; i < categories.size(); ++i)
        total_chain = Bld("add").a(total_chain).a(var_of(categories[i].c_str()));
    body.push_back(Bld("set_var").f("name", "total").a(total_chain));

    for (const auto& c : categories) {
        body.push_back(
            Bld("if")
                .a(Bld("gt").a(var_of(c.c_str())).a(0))
                .body({Bld("say").a(Bld("join")
                                        .a(c + ": ")
                                        .a(Bld("div").a(var_of(c.c_str())).a(var_of("total"))))}));
    }

    std::vector<VariableDecl> vars;
    for (const auto& c : categories) vars.push_back({c, false, 0.0});
    vars.push_back({"total", false, 0.0});
    return one_sprite_program(make_sprite("Chart", {flag_script(body)}, std::move(vars)));
}

// Cloud-variable accumulation of love-its and favorites over the viewer's
// shared projects.
Program loveits_vs_favorites() {
    Program p = one_sprite_program(make_sprite(
        "Tracker",
        {flag_script({
            foreach_loop("shared", viewer(),
                         {
                             Bld("change_var")
                                 .f("name", "total loves")
                                 .a(project_meta("loves")),
                             Bld("change_var")
                                 .f("name", "total favorites")
                                 .a(project_meta("favorites")),
                         }),
        })},
        {{"total loves", true, 0.0}, {"total favorites", true, 0.0}}));
    p.cloud_project_id = 1;
    return p;
}

// The documented misuse pattern: a user accessor outside any community loop,
// written expecting it to describe the current viewer.
Program misconception1() {
    return one_sprite_program(make_sprite(
        "Sprite1", {flag_script({
                       Bld("say").a(Bld("join").a("You are from: ").a(user_meta("country"))),
                   })}));
}

// Community totals polled inside a loop, expecting live updates.
Program stats_in_loop() {
    return one_sprite_program(make_sprite(
        "Sprite1",
        {flag_script({
            Bld("repeat").a(10).body(
                {Bld("say").a(Bld("join").a("projects: ").a(
                    Bld("comm_total").f("kind", "projects")))}),
        })}));
}

}  // namespace

const std::vector<std::pair<std::string, Program>>& example_programs() {
    static const std::vector<std::pair<std::string, Program>> programs = {
        {"project_titles", project_titles()},
        {"spain_followers", spain_followers()},
        {"my_sound_projects", my_sound_projects()},
        {"sound_recommender", sound_recommender()},
        {"talkative", talkative()},
        {"doughnut_data", doughnut_data()},
        {"loveits_vs_favorites", loveits_vs_favorites()},
    };
    return programs;
}

const std::vector<std::pair<std::string, Program>>& lint_fixture_programs() {
    static const std::vector<std::pair<std::string, Program>> programs = {
        {"misconception1", misconception1()},
        {"stats_in_loop", stats_in_loop()},
    };
    return programs;
}

const Program& example_program(const std::string& name) {
    for (const auto& [key, program] : example_programs())
        if (key == name) return program;
    for (const auto& [key, program] : lint_fixture_programs())
        if (key == name) return program;
    throw NotFoundError("unknown example: " + name);
}

}  // namespace scb
