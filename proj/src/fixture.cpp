#include "scb/fixture.hpp"

#include "scb/build.hpp"

namespace scb {

namespace {

Program cat_maze_code() {
    return one_sprite_program(make_sprite(
        "Cat", {flag_script({
                   Bld("say").a("Welcome to Cat Maze"),
                   Bld("say").a("Find the fish"),
                   Bld("play_sound").f("sound", "meow"),
               })}));
}

Program pong_code() {
    return one_sprite_program(
        make_sprite("Paddle", {flag_script({Bld("say").a("Pong!")})}));
}

Program quiz_code() {
    // ask whose argument is the previous answer: ask x1, answer x1.
    return one_sprite_program(
        make_sprite("Quiz", {flag_script({Bld("ask").a(Bld("answer"))})}));
}

Project project(long long id, std::string author, std::string title,
                std::string description, long long loves, long long favorites,
                long long comments, Program code) {
    Project p;
    p.id = id;
    p.author = std::move(author);
    p.title = std::move(title);
    p.description = std::move(description);
    p.loves = loves;
    p.favorites = favorites;
    p.comments = comments;
    p.code = std::move(code);
    p.created_seq = id;
    return p;
}

}  // namespace

CommunityStore make_s0() {
    CommunityStore s;
    s.add_user({"alice", "hi", "Spain"});
    s.add_user({"bob", "", "USA"});
    s.add_user({"carol", "artist", "Spain"});
    s.add_project(project(1, "alice", "Cat Maze", "fun maze", 3, 2, 1, cat_maze_code()));
    s.add_project(project(2, "alice", "Pong", "", 1, 5, 0, pong_code()));
    s.add_project(project(3, "bob", "Quiz", "abc", 0, 0, 4, quiz_code()));
    s.add_follow("bob", "alice");
    s.add_follow("carol", "alice");
    s.add_follow("alice", "carol");
    s.add_favorite("alice", 3);
    s.add_favorite("carol", 1);
    s.validate();
    return s;
}

}  // namespace scb
