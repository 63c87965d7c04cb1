#include "scb/interp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "scb/jsonutil.hpp"

namespace scb {

using nlohmann::json;

const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::Say: return "SAY";
        case EventKind::Think: return "THINK";
        case EventKind::Ask: return "ASK";
        case EventKind::Diag: return "DIAG";
    }
    return "?";
}

std::string Transcript::to_text() const {
    std::string out;
    for (const auto& e : events) {
        out += "T" + std::to_string(e.tick) + " " + e.sprite + " " +
               event_kind_name(e.kind) + " " + quote_string(e.payload) + "\n";
    }
    for (const auto& v : vars)
        out += "VAR " + v.sprite + "." + v.name + "=" + to_display_string(v.value) + "\n";
    out += "END tick=" + std::to_string(end_tick) +
           " reason=" + (max_ticks_hit ? "max_ticks" : "done") + "\n";
    return out;
}

namespace {

const char* relation_route(const std::string& relation) {
    if (relation == "shared") return "projects";
    if (relation == "favorited") return "favorites";
    if (relation == "followers") return "followers";
    return "following";
}

bool is_project_relation(const std::string& relation) {
    return relation == "shared" || relation == "favorited";
}

struct Frame {
    enum class Kind { Seq, Repeat, Forever, Foreach };
    Kind kind = Kind::Seq;
    const std::vector<Block>* stmts = nullptr;
    std::size_t pos = 0;
    bool at_head = false;     // loops: the next step is the head check
    long long remaining = 0;  // repeat
    json items;               // foreach: complete item list snapshot
    std::size_t item_idx = 0;
    bool project_loop = false;
    BlockPath owner;  // path of the owning block (or the script for the top frame)
    PathStep::Kind step_kind = PathStep::Body;
};

struct ScriptRt {
    int sprite_idx = 0;
    int script_idx = 0;
    const Script* script = nullptr;
    enum class Status { Idle, Runnable, BlockedUntil, BlockedOnFetch, Done };
    Status status = Status::Idle;
    long long wake_tick = 0;
    std::string pending_fetch;
    std::vector<Frame> frames;
    std::string answer;  // per-script register, defaults to ""
};

struct SpriteRt {
    const Sprite* sprite = nullptr;
    std::map<std::string, Value> vars;  // non-cloud values
};

class Runner {
  public:
    Runner(const Program& program, const RunOptions& options, Session& session)
        : program_(program), options_(options), session_(session),
          answers_(options.answers) {
        for (std::size_t si = 0; si < program.sprites.size(); ++si) {
            const Sprite& sp = program.sprites[si];
            SpriteRt rt;
            rt.sprite = &sp;
            for (const auto& decl : sp.variables)
                if (!decl.cloud) rt.vars[decl.name] = Value(decl.init);
            sprites_.push_back(std::move(rt));
            for (std::size_t ki = 0; ki < sp.scripts.size(); ++ki) {
                ScriptRt sc;
                sc.sprite_idx = static_cast<int>(si);
                sc.script_idx = static_cast<int>(ki);
                sc.script = &sp.scripts[ki];
                scripts_.push_back(std::move(sc));
            }
        }
    }

    Transcript run() {
        const CacheEntry& viewer = session_.fetch_all("/api/users/" + options_.viewer);
        if (viewer.not_found)
            throw NotFoundError("unknown viewer: " + options_.viewer);

        std::vector<EventInjection> events = options_.events;
        std::stable_sort(events.begin(), events.end(),
                         [](const EventInjection& a, const EventInjection& b) {
                             return a.tick < b.tick;
                         });
        std::size_t next_event = 0;

        for (tick_ = 0;; ++tick_) {
            if (tick_ >= options_.max_ticks) {
                out_.end_tick = options_.max_ticks;
                out_.max_ticks_hit = true;
                break;
            }
            while (next_event < events.size() && events[next_event].tick == tick_)
                inject(events[next_event++]);
            for (auto& sc : scripts_) {
                if (sc.status == ScriptRt::Status::BlockedUntil && sc.wake_tick <= tick_) {
                    sc.status = ScriptRt::Status::Runnable;
                } else if (sc.status == ScriptRt::Status::BlockedOnFetch &&
                           sc.wake_tick <= tick_) {
                    session_.fetch_all(sc.pending_fetch);
                    sc.status = ScriptRt::Status::Runnable;
                }
            }
            for (auto& sc : scripts_)
                if (sc.status == ScriptRt::Status::Runnable) run_slice(sc);

            bool active = false;
            for (const auto& sc : scripts_)
                if (sc.status != ScriptRt::Status::Idle &&
                    sc.status != ScriptRt::Status::Done)
                    active = true;
            if (!active && next_event >= events.size()) {
                out_.end_tick = tick_;
                break;
            }
        }
        dump_vars();
        return std::move(out_);
    }

  private:
    const Program& program_;
    const RunOptions& options_;
    Session& session_;
    Transcript out_;
    std::vector<SpriteRt> sprites_;
    std::vector<ScriptRt> scripts_;
    std::deque<std::string> answers_;
    long long tick_ = 0;
    std::set<std::pair<std::string, std::string>> diag_seen_;  // (rule, path)

    const std::string& sprite_name(const ScriptRt& sc) const {
        return sprites_[static_cast<std::size_t>(sc.sprite_idx)].sprite->name;
    }

    void emit(const ScriptRt& sc, EventKind kind, std::string payload) {
        out_.events.push_back({tick_, sprite_name(sc), kind, std::move(payload)});
    }

    // DIAG events deduplicate per (rule, block path) per run.
    void diag(const ScriptRt& sc, const std::string& rule, const BlockPath& path,
              const std::string& message) {
        if (!diag_seen_.emplace(rule, path.str()).second) return;
        out_.events.push_back({tick_, sprite_name(sc), EventKind::Diag, message});
    }

    void inject(const EventInjection& ev) {
        for (auto& sc : scripts_) {
            const Block& hat = sc.script->hat;
            bool match;
            if (ev.key.empty()) {
                match = hat.op == "whenflagclicked";
            } else {
                auto it = hat.fields.find("key");
                match = hat.op == "whenkeypressed" && it != hat.fields.end() &&
                        it->second == ev.key;
            }
            if (match && (sc.status == ScriptRt::Status::Idle ||
                          sc.status == ScriptRt::Status::Done))
                start(sc);
        }
    }

    void start(ScriptRt& sc) {
        sc.frames.clear();
        Frame top;
        top.kind = Frame::Kind::Seq;
        top.stmts = &sc.script->body;
        top.owner = BlockPath{sc.sprite_idx, sc.script_idx, {}};
        top.step_kind = PathStep::Body;
        sc.frames.push_back(std::move(top));
        sc.answer.clear();
        sc.status = ScriptRt::Status::Runnable;
    }

    // Pops the finished frame and advances the parent past the owning block.
    void pop_frame(ScriptRt& sc) {
        sc.frames.pop_back();
        if (sc.frames.empty())
            sc.status = ScriptRt::Status::Done;
        else
            ++sc.frames.back().pos;
    }

    void block_until(ScriptRt& sc, long long wake) {
        sc.status = ScriptRt::Status::BlockedUntil;
        sc.wake_tick = wake;
    }

    void block_on_fetch(ScriptRt& sc, const std::string& key) {
        sc.status = ScriptRt::Status::BlockedOnFetch;
        sc.pending_fetch = key;
        sc.wake_tick = tick_ + session_.latency_ticks();
    }

    // --- context frames ----------------------------------------------------

    const json* innermost_item(const ScriptRt& sc, bool want_project) const {
        for (auto it = sc.frames.rbegin(); it != sc.frames.rend(); ++it) {
            const Frame& f = *it;
            if (f.kind != Frame::Kind::Foreach || f.project_loop != want_project) continue;
            if (f.item_idx < f.items.size()) return &f.items[f.item_idx];
        }
        return nullptr;
    }

    // --- fetch pre-resolution ------------------------------------------------

    // Cache keys an expression tree needs before it can evaluate without
    // touching the network: /api/stats for comm_total, the current project
    // frame's code-meta for category/count predicates.
    void scan_needs(const ScriptRt& sc, const Block& block,
                    std::vector<std::string>& keys) const {
        for (const Arg& arg : block.args) {
            if (!std::holds_alternative<std::unique_ptr<Block>>(arg)) continue;
            const Block& child = *std::get<std::unique_ptr<Block>>(arg);
            if (child.op == "comm_total") {
                keys.push_back("/api/stats");
            } else if (child.op == "comm_project_uses_category" ||
                       child.op == "comm_project_block_count") {
                if (const json* item = innermost_item(sc, true)) {
                    long long id = (*item)["id"].get<long long>();
                    keys.push_back("/api/projects/" + std::to_string(id) + "/code-meta");
                }
            }
            scan_needs(sc, child, keys);
        }
    }

    // First key the statement needs that is not cached yet, or "".
    std::string first_uncached_need(const ScriptRt& sc, const Block& stmt) const {
        std::vector<std::string> keys;
        scan_needs(sc, stmt, keys);
        for (const auto& key : keys)
            if (!session_.cached(key)) return key;
        return "";
    }

    // --- expression evaluation ----------------------------------------------

    Value eval_arg(ScriptRt& sc, const Block& parent, std::size_t index,
                   const BlockPath& parent_path) {
        const Arg& arg = parent.args[index];
        if (std::holds_alternative<Value>(arg)) return std::get<Value>(arg);
        const Block& child = *std::get<std::unique_ptr<Block>>(arg);
        return eval_block(sc, child, parent_path.child(PathStep::Arg, static_cast<int>(index)));
    }

    double eval_num(ScriptRt& sc, const Block& parent, std::size_t index,
                    const BlockPath& path) {
        return to_number(eval_arg(sc, parent, index, path));
    }

    Value eval_block(ScriptRt& sc, const Block& b, const BlockPath& path) {
        const std::string& op = b.op;
        if (op == "answer") return Value(sc.answer);
        if (op == "var") return eval_var(sc, b, path);
        if (op == "add") return Value(eval_num(sc, b, 0, path) + eval_num(sc, b, 1, path));
        if (op == "sub") return Value(eval_num(sc, b, 0, path) - eval_num(sc, b, 1, path));
        if (op == "mul") return Value(eval_num(sc, b, 0, path) * eval_num(sc, b, 1, path));
        if (op == "div") return Value(eval_num(sc, b, 0, path) / eval_num(sc, b, 1, path));
        if (op == "mod") {
            double a = eval_num(sc, b, 0, path);
            double m = eval_num(sc, b, 1, path);
            double r = std::fmod(a, m);
            if (r != 0.0 && ((r < 0.0) != (m < 0.0))) r += m;  // floored, like Scratch
            return Value(r);
        }
        if (op == "round") return Value(std::floor(eval_num(sc, b, 0, path) + 0.5));
        if (op == "gt")
            return Value(compare_values(eval_arg(sc, b, 0, path), eval_arg(sc, b, 1, path)) > 0);
        if (op == "lt")
            return Value(compare_values(eval_arg(sc, b, 0, path), eval_arg(sc, b, 1, path)) < 0);
        if (op == "eq")
            return Value(compare_values(eval_arg(sc, b, 0, path), eval_arg(sc, b, 1, path)) == 0);
        if (op == "and") {
            // inputs are evaluated eagerly, as in Scratch
            bool lhs = to_bool(eval_arg(sc, b, 0, path));
            bool rhs = to_bool(eval_arg(sc, b, 1, path));
            return Value(lhs && rhs);
        }
        if (op == "or") {
            bool lhs = to_bool(eval_arg(sc, b, 0, path));
            bool rhs = to_bool(eval_arg(sc, b, 1, path));
            return Value(lhs || rhs);
        }
        if (op == "not") return Value(!to_bool(eval_arg(sc, b, 0, path)));
        if (op == "join")
            return Value(to_display_string(eval_arg(sc, b, 0, path)) +
                         to_display_string(eval_arg(sc, b, 1, path)));
        if (op == "length_of")
            return Value(
                static_cast<double>(to_display_string(eval_arg(sc, b, 0, path)).size()));
        if (op == "comm_viewer_username") return Value(options_.viewer);
        if (op == "comm_total") return eval_total(b);
        if (op == "comm_project_meta") return eval_project_meta(sc, b, path);
        if (op == "comm_user_meta") return eval_user_meta(sc, b, path);
        if (op == "comm_project_uses_category") return eval_uses_category(sc, b, path);
        if (op == "comm_project_block_count") return eval_block_count(sc, b, path);
        return Value(0.0);  // unreachable for valid programs
    }

    Value eval_var(ScriptRt& sc, const Block& b, const BlockPath& path) {
        const std::string& name = b.fields.at("name");
        const Sprite& sp = *sprites_[static_cast<std::size_t>(sc.sprite_idx)].sprite;
        for (const auto& decl : sp.variables) {
            if (decl.name != name) continue;
            if (decl.cloud) return Value(cloud_get(sc, name, path));
            return sprites_[static_cast<std::size_t>(sc.sprite_idx)].vars.at(name);
        }
        return Value(0.0);  // unreachable: parser checks declarations
    }

    Value eval_total(const Block& b) {
        const std::string& kind = b.fields.at("kind");
        const CacheEntry& entry = session_.fetch_all("/api/stats");
        if (!entry.value.is_object() || !entry.value.contains(kind)) return Value(0.0);
        return Value(entry.value[kind].get<double>());
    }

    Value eval_project_meta(ScriptRt& sc, const Block& b, const BlockPath& path) {
        const std::string& field = b.fields.at("field");
        bool text = field == "title" || field == "description";
        const json* item = innermost_item(sc, true);
        if (!item) {
            diag(sc, "L1", path, "L1 out-of-context comm_project_meta at " + path.str());
            return text ? Value(std::string()) : Value(0.0);
        }
        if (text) return Value((*item)[field].get<std::string>());
        return Value((*item)[field].get<double>());
    }

    Value eval_user_meta(ScriptRt& sc, const Block& b, const BlockPath& path) {
        const std::string& field = b.fields.at("field");
        const json* item = innermost_item(sc, false);
        if (!item) {
            diag(sc, "L1", path, "L1 out-of-context comm_user_meta at " + path.str());
            return Value(std::string());
        }
        return Value((*item)[field].get<std::string>());
    }

    const json* project_code_meta(ScriptRt& sc, const json& item) {
        long long id = item["id"].get<long long>();
        const CacheEntry& entry =
            session_.fetch_all("/api/projects/" + std::to_string(id) + "/code-meta");
        return entry.not_found ? nullptr : &entry.value;
    }

    Value eval_uses_category(ScriptRt& sc, const Block& b, const BlockPath& path) {
        const json* item = innermost_item(sc, true);
        if (!item) {
            diag(sc, "L1", path,
                 "L1 out-of-context comm_project_uses_category at " + path.str());
            return Value(false);
        }
        const json* meta = project_code_meta(sc, *item);
        if (!meta) return Value(false);
        const std::string& category = b.fields.at("category");
        for (const auto& c : (*meta)["categories"])
            if (c.get<std::string>() == category) return Value(true);
        return Value(false);
    }

    Value eval_block_count(ScriptRt& sc, const Block& b, const BlockPath& path) {
        const json* item = innermost_item(sc, true);
        if (!item) {
            diag(sc, "L1", path,
                 "L1 out-of-context comm_project_block_count at " + path.str());
            return Value(0.0);
        }
        const json* meta = project_code_meta(sc, *item);
        if (!meta) return Value(0.0);
        const std::string& opcode = b.fields.at("opcode");
        const json& counts = (*meta)["opcode_counts"];
        if (!counts.contains(opcode)) return Value(0.0);
        return Value(counts[opcode].get<double>());
    }

    // --- cloud variables -----------------------------------------------------

    std::string cloud_path(const std::string& name) const {
        return "/api/cloud/" + std::to_string(*program_.cloud_project_id) + "/" + name;
    }

    double cloud_get(ScriptRt& sc, const std::string& name, const BlockPath& path) {
        TransportResponse res = session_.cloud_get(cloud_path(name));
        if (res.status == 404) {
            diag(sc, "cloud", path,
                 "unknown cloud project: " + std::to_string(*program_.cloud_project_id));
            return 0.0;
        }
        if (res.status != 200)
            throw TransportError("cloud read failed for " + cloud_path(name));
        return json::parse(res.body)["value"].get<double>();
    }

    void cloud_put(ScriptRt& sc, const std::string& name, const char* mode, double v,
                   const BlockPath& path) {
        if (!std::isfinite(v)) {
            diag(sc, "cloud", path, "cloud write skipped: non-finite value");
            return;
        }
        json body;
        body[mode] = json_number(v);
        TransportResponse res = session_.cloud_put(cloud_path(name), body.dump());
        if (res.status == 404) {
            diag(sc, "cloud", path,
                 "unknown cloud project: " + std::to_string(*program_.cloud_project_id));
            return;
        }
        if (res.status != 200)
            throw TransportError("cloud write failed for " + cloud_path(name));
    }

    // --- statement execution --------------------------------------------------

    // Runs one script until it yields, blocks, or finishes. Document-order
    // fairness comes from the caller iterating scripts in order each tick.
    void run_slice(ScriptRt& sc) {
        while (sc.status == ScriptRt::Status::Runnable) {
            if (sc.frames.empty()) {
                sc.status = ScriptRt::Status::Done;
                return;
            }
            Frame& f = sc.frames.back();
            if (f.at_head) {
                if (f.kind == Frame::Kind::Repeat && f.remaining <= 0) {
                    pop_frame(sc);
                    continue;
                }
                if (f.kind == Frame::Kind::Foreach && f.item_idx >= f.items.size()) {
                    pop_frame(sc);
                    continue;
                }
                f.at_head = false;
                f.pos = 0;
                continue;
            }
            if (f.pos >= f.stmts->size()) {
                if (f.kind == Frame::Kind::Seq) {
                    pop_frame(sc);
                    continue;
                }
                // Bottom of a loop iteration: built-in yield.
                if (f.kind == Frame::Kind::Repeat) --f.remaining;
                if (f.kind == Frame::Kind::Foreach) ++f.item_idx;
                f.at_head = true;
                return;
            }
            exec_statement(sc, f, (*f.stmts)[f.pos]);
        }
    }

    void push_body(ScriptRt& sc, Frame::Kind kind, const std::vector<Block>* stmts,
                   const BlockPath& owner, PathStep::Kind step_kind) {
        Frame f;
        f.kind = kind;
        f.stmts = stmts;
        f.owner = owner;
        f.step_kind = step_kind;
        f.at_head = kind != Frame::Kind::Seq;
        sc.frames.push_back(std::move(f));
    }

    void exec_statement(ScriptRt& sc, Frame& f, const Block& stmt) {
        BlockPath path = f.owner.child(f.step_kind, static_cast<int>(f.pos));

        // Phase A: make sure every key the argument expressions touch is
        // cached; block for one latency window per missing key.
        std::string need = first_uncached_need(sc, stmt);
        if (!need.empty()) {
            block_on_fetch(sc, need);
            return;
        }

        const std::string& op = stmt.op;
        if (op == "say" || op == "think") {
            Value v = eval_arg(sc, stmt, 0, path);
            emit(sc, op == "say" ? EventKind::Say : EventKind::Think, to_display_string(v));
            ++f.pos;
            return;
        }
        if (op == "wait") {
            double secs = to_number(eval_arg(sc, stmt, 0, path));
            long long ticks = static_cast<long long>(std::ceil(secs * 30.0));
            if (ticks < 1) ticks = 1;
            block_until(sc, tick_ + ticks);
            ++f.pos;
            return;
        }
        if (op == "repeat") {
            double n = std::floor(to_number(eval_arg(sc, stmt, 0, path)) + 0.5);
            long long count = n > 0 ? static_cast<long long>(n) : 0;
            if (count <= 0) {
                ++f.pos;
                return;
            }
            push_body(sc, Frame::Kind::Repeat, &stmt.body, path, PathStep::Body);
            sc.frames.back().remaining = count;
            return;
        }
        if (op == "forever") {
            push_body(sc, Frame::Kind::Forever, &stmt.body, path, PathStep::Body);
            return;
        }
        if (op == "if") {
            if (to_bool(eval_arg(sc, stmt, 0, path)))
                push_body(sc, Frame::Kind::Seq, &stmt.body, path, PathStep::Body);
            else
                ++f.pos;
            return;
        }
        if (op == "if_else") {
            if (to_bool(eval_arg(sc, stmt, 0, path)))
                push_body(sc, Frame::Kind::Seq, &stmt.body, path, PathStep::Body);
            else
                push_body(sc, Frame::Kind::Seq, &stmt.else_body, path, PathStep::Else);
            return;
        }
        if (op == "stop") {
            sc.frames.clear();
            sc.status = ScriptRt::Status::Done;
            return;
        }
        if (op == "set_var" || op == "change_var") {
            exec_var_write(sc, f, stmt, path);
            return;
        }
        if (op == "ask") {
            Value q = eval_arg(sc, stmt, 0, path);
            emit(sc, EventKind::Ask, to_display_string(q));
            if (answers_.empty()) {
                sc.answer.clear();
                diag(sc, "answers", path, "answer queue exhausted");
            } else {
                sc.answer = answers_.front();
                answers_.pop_front();
            }
            block_until(sc, tick_ + 1);
            ++f.pos;
            return;
        }
        if (op == "play_sound" || op == "pen_down" || op == "pen_up" || op == "pen_move") {
            if (op == "pen_move") eval_arg(sc, stmt, 0, path);  // effects are no-ops
            ++f.pos;
            return;
        }
        if (op == "comm_foreach") {
            exec_foreach(sc, f, stmt, path);
            return;
        }
        ++f.pos;  // unreachable for valid programs
    }

    void exec_var_write(ScriptRt& sc, Frame& f, const Block& stmt, const BlockPath& path) {
        const std::string& name = stmt.fields.at("name");
        const Sprite& sp = *sprites_[static_cast<std::size_t>(sc.sprite_idx)].sprite;
        const VariableDecl* decl = nullptr;
        for (const auto& d : sp.variables)
            if (d.name == name) decl = &d;
        Value v = eval_arg(sc, stmt, 0, path);
        if (decl && decl->cloud) {
            cloud_put(sc, name, stmt.op == "set_var" ? "set" : "change", to_number(v), path);
        } else if (decl) {
            auto& vars = sprites_[static_cast<std::size_t>(sc.sprite_idx)].vars;
            if (stmt.op == "set_var")
                vars[name] = std::move(v);
            else
                vars[name] = Value(to_number(vars[name]) + to_number(v));
        }
        ++f.pos;
    }

    void exec_foreach(ScriptRt& sc, Frame& f, const Block& stmt, const BlockPath& path) {
        // Phase B: the list itself. Evaluate the username, then require the
        // complete list in cache before entering the loop.
        Value uv = eval_arg(sc, stmt, 0, path);
        std::string username = to_display_string(uv);
        const std::string& relation = stmt.fields.at("relation");
        std::string key = "/api/users/" + username + "/" + relation_route(relation);
        if (!session_.cached(key)) {
            block_on_fetch(sc, key);
            return;
        }
        const CacheEntry& entry = session_.fetch_all(key);
        if (entry.not_found) {
            diag(sc, "unknown-user", path, "unknown user: " + username);
            ++f.pos;
            return;
        }
        push_body(sc, Frame::Kind::Foreach, &stmt.body, path, PathStep::Body);
        Frame& loop = sc.frames.back();
        loop.items = entry.value;
        loop.project_loop = is_project_relation(relation);
    }

    void dump_vars() {
        for (std::size_t si = 0; si < sprites_.size(); ++si) {
            const Sprite& sp = *sprites_[si].sprite;
            for (const auto& decl : sp.variables) {
                VarDump d;
                d.sprite = sp.name;
                d.name = decl.name;
                if (decl.cloud) {
                    TransportResponse res = session_.cloud_get(cloud_path(decl.name));
                    d.value = Value(res.status == 200
                                        ? json::parse(res.body)["value"].get<double>()
                                        : 0.0);
                } else {
                    d.value = sprites_[si].vars.at(decl.name);
                }
                out_.vars.push_back(std::move(d));
            }
        }
    }
};

}  // namespace

Transcript run_program(const Program& program, const RunOptions& options, Session& session) {
    if (options.max_ticks < 1) throw ConfigError("max_ticks must be >= 1");
    session.begin_run();
    try {
        Runner runner(program, options, session);
        Transcript t = runner.run();
        session.end_run();
        return t;
    } catch (...) {
        session.end_run();
        throw;
    }
}

}  // namespace scb
