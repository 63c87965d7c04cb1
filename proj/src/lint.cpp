#include "scb/lint.hpp"

namespace scb {

std::string Diagnostic::line() const {
    return std::string(severity == Severity::Error ? "error" : "warning") + " " + rule + " " +
           path.str() + " " + message;
}

namespace {

bool is_project_accessor(const std::string& op) {
    return op == "comm_project_meta" || op == "comm_project_uses_category" ||
           op == "comm_project_block_count";
}

bool is_loop(const std::string& op) {
    return op == "repeat" || op == "forever" || op == "comm_foreach";
}

struct Scope {
    bool in_project_loop = false;
    bool in_user_loop = false;
    bool in_any_loop = false;
};

void check_block(const Block& block, const BlockPath& path, Scope scope,
                 std::vector<Diagnostic>& out) {
    if (is_project_accessor(block.op) && !scope.in_project_loop)
        out.push_back({"L1", path,
                       "out-of-context " + block.op +
                           " needs an enclosing for-each over projects (shared/favorited)",
                       Severity::Error});
    if (block.op == "comm_user_meta" && !scope.in_user_loop)
        out.push_back({"L1", path,
                       "out-of-context comm_user_meta needs an enclosing for-each over users "
                       "(followers/following)",
                       Severity::Error});
    if (block.op == "comm_total" && scope.in_any_loop)
        out.push_back({"L2", path,
                       "comm_total inside a loop re-reads a cached value; it will not update",
                       Severity::Warning});

    // Arguments evaluate before a loop's own frame exists, so they inherit
    // the surrounding scope, not the loop's.
    int i = 0;
    for (const auto& arg : block.args) {
        if (const auto* child = std::get_if<std::unique_ptr<Block>>(&arg))
            check_block(**child, path.child(PathStep::Arg, i), scope, out);
        ++i;
    }

    Scope inner = scope;
    if (is_loop(block.op)) inner.in_any_loop = true;
    if (block.op == "comm_foreach") {
        const std::string& rel = block.fields.at("relation");
        if (rel == "shared" || rel == "favorited") inner.in_project_loop = true;
        if (rel == "followers" || rel == "following") inner.in_user_loop = true;
    }
    for (size_t b = 0; b < block.body.size(); ++b)
        check_block(block.body[b], path.child(PathStep::Body, static_cast<int>(b)), inner, out);
    for (size_t e = 0; e < block.else_body.size(); ++e)
        check_block(block.else_body[e], path.child(PathStep::Else, static_cast<int>(e)), inner,
                    out);
}

}  // namespace

std::vector<Diagnostic> lint(const Program& program) {
    std::vector<Diagnostic> out;
    for (size_t sp = 0; sp < program.sprites.size(); ++sp) {
        const Sprite& sprite = program.sprites[sp];
        for (size_t sc = 0; sc < sprite.scripts.size(); ++sc) {
            BlockPath path;
            path.sprite = static_cast<int>(sp);
            path.script = static_cast<int>(sc);
            const Script& script = sprite.scripts[sc];
            for (size_t b = 0; b < script.body.size(); ++b)
                check_block(script.body[b], path.child(PathStep::Body, static_cast<int>(b)),
                            Scope{}, out);
        }
    }
    return out;
}

}  // namespace scb
