#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scb/program.hpp"

namespace scb {

// Fluent block assembly for fixtures, shipped examples and tests.
// Copyable on purpose so brace-lists of children read naturally.
struct Bld {
    Block b;

    explicit Bld(std::string op) { b.op = std::move(op); }

    Bld& f(const std::string& key, const std::string& value) {
        b.fields[key] = value;
        return *this;
    }
    Bld& a(double v) {
        b.args.emplace_back(Value(v));
        return *this;
    }
    Bld& a(int v) { return a(static_cast<double>(v)); }
    Bld& a(bool v) {
        b.args.emplace_back(Value(v));
        return *this;
    }
    Bld& a(const char* s) {
        b.args.emplace_back(Value(std::string(s)));
        return *this;
    }
    Bld& a(std::string s) {
        b.args.emplace_back(Value(std::move(s)));
        return *this;
    }
    Bld& a(const Bld& child) {
        b.args.emplace_back(std::make_unique<Block>(child.b));
        return *this;
    }
    Bld& body(const std::vector<Bld>& kids) {
        for (const auto& k : kids) b.body.push_back(k.b);
        return *this;
    }
    Bld& els(const std::vector<Bld>& kids) {
        for (const auto& k : kids) b.else_body.push_back(k.b);
        return *this;
    }
    operator Block() const { return b; }
};

inline Script make_script(const Bld& hat, const std::vector<Bld>& body) {
    Script s;
    s.hat = hat.b;
    for (const auto& k : body) s.body.push_back(k.b);
    return s;
}

inline Script flag_script(const std::vector<Bld>& body) {
    return make_script(Bld("whenflagclicked"), body);
}

inline Sprite make_sprite(std::string name, std::vector<Script> scripts,
                          std::vector<VariableDecl> vars = {}) {
    Sprite sp;
    sp.name = std::move(name);
    sp.variables = std::move(vars);
    sp.scripts = std::move(scripts);
    return sp;
}

inline Program one_sprite_program(Sprite sprite) {
    Program p;
    p.sprites.push_back(std::move(sprite));
    return p;
}

}  // namespace scb
