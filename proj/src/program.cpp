#include "scb/program.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace scb {

using nlohmann::json;

// --- opcode table ----------------------------------------------------------

namespace {

std::vector<OpInfo> build_table() {
    auto hat = [](const char* op, const char* cat, std::vector<std::string> fields = {}) {
        return OpInfo{op, BlockShape::Hat, cat, 0, std::move(fields), false, false};
    };
    auto stmt = [](const char* op, const char* cat, int arity,
                   std::vector<std::string> fields = {}, bool body = false, bool els = false) {
        return OpInfo{op, BlockShape::Statement, cat, arity, std::move(fields), body, els};
    };
    auto rep = [](const char* op, const char* cat, int arity,
                  std::vector<std::string> fields = {}) {
        return OpInfo{op, BlockShape::Reporter, cat, arity, std::move(fields), false, false};
    };
    return {
        hat("whenflagclicked", "events"),
        hat("whenkeypressed", "events", {"key"}),

        stmt("say", "looks", 1),
        stmt("think", "looks", 1),
        stmt("wait", "control", 1),
        stmt("repeat", "control", 1, {}, true),
        stmt("forever", "control", 0, {}, true),
        stmt("if", "control", 1, {}, true),
        stmt("if_else", "control", 1, {}, true, true),
        stmt("stop", "control", 0),
        stmt("set_var", "data", 1, {"name"}),
        stmt("change_var", "data", 1, {"name"}),
        stmt("ask", "sensing", 1),
        stmt("play_sound", "sound", 0, {"sound"}),
        stmt("pen_down", "pen", 0),
        stmt("pen_up", "pen", 0),
        stmt("pen_move", "pen", 1),

        rep("answer", "sensing", 0),
        rep("var", "data", 0, {"name"}),
        rep("add", "operators", 2),
        rep("sub", "operators", 2),
        rep("mul", "operators", 2),
        rep("div", "operators", 2),
        rep("mod", "operators", 2),
        rep("round", "operators", 1),
        rep("gt", "operators", 2),
        rep("lt", "operators", 2),
        rep("eq", "operators", 2),
        rep("and", "operators", 2),
        rep("or", "operators", 2),
        rep("not", "operators", 1),
        rep("join", "operators", 2),
        rep("length_of", "operators", 1),

        stmt("comm_foreach", "community", 1, {"relation"}, true),
        rep("comm_project_meta", "community", 0, {"field"}),
        rep("comm_project_uses_category", "community", 0, {"category"}),
        rep("comm_project_block_count", "community", 0, {"opcode"}),
        rep("comm_user_meta", "community", 0, {"field"}),
        rep("comm_viewer_username", "community", 0),
        rep("comm_total", "community", 0, {"kind"}),
    };
}

const std::set<std::string>& category_set() {
    static const std::set<std::string> cats = [] {
        std::set<std::string> s;
        for (const auto& info : opcode_table()) s.insert(info.category);
        return s;
    }();
    return cats;
}

}  // namespace

const std::vector<OpInfo>& opcode_table() {
    static const std::vector<OpInfo> table = build_table();
    return table;
}

const OpInfo* find_op(const std::string& op) {
    static const std::map<std::string, const OpInfo*> index = [] {
        std::map<std::string, const OpInfo*> m;
        for (const auto& info : opcode_table()) m[info.op] = &info;
        return m;
    }();
    auto it = index.find(op);
    return it == index.end() ? nullptr : it->second;
}

const std::string& category_of(const std::string& op) {
    const OpInfo* info = find_op(op);
    if (!info) throw Error("unknown opcode: " + op);
    return info->category;
}

bool is_known_category(const std::string& category) {
    return category_set().count(category) > 0;
}

const std::vector<std::string>& category_names() {
    static const std::vector<std::string> names(category_set().begin(), category_set().end());
    return names;
}

bool field_value_allowed(const std::string& op, const std::string& field,
                         const std::string& value) {
    if (op == "comm_foreach" && field == "relation")
        return value == "shared" || value == "favorited" || value == "followers" ||
               value == "following";
    if (op == "comm_project_meta" && field == "field")
        return value == "title" || value == "description" || value == "loves" ||
               value == "favorites" || value == "comments";
    if (op == "comm_user_meta" && field == "field")
        return value == "username" || value == "about" || value == "country";
    if (op == "comm_total" && field == "kind")
        return value == "projects" || value == "users" || value == "comments";
    if (op == "comm_project_uses_category" && field == "category")
        return is_known_category(value);
    if (op == "comm_project_block_count" && field == "opcode")
        return find_op(value) != nullptr;
    if (op == "whenkeypressed" && field == "key") return !value.empty();
    if ((op == "set_var" || op == "change_var" || op == "var") && field == "name")
        return !value.empty();
    if (op == "play_sound" && field == "sound") return true;
    return false;
}

// --- block paths -------------------------------------------------------

BlockPath BlockPath::child(PathStep::Kind kind, int index) const {
    BlockPath out = *this;
    out.steps.push_back({kind, index});
    return out;
}

std::string BlockPath::str() const {
    std::ostringstream os;
    os << sprite << '/' << script;
    for (const auto& step : steps) {
        os << '/';
        switch (step.kind) {
            case PathStep::Hat: os << 'h'; continue;
            case PathStep::Body: os << 'b'; break;
            case PathStep::Else: os << 'e'; break;
            case PathStep::Arg: os << 'a'; break;
        }
        os << step.index;
    }
    return os.str();
}

// --- AST copies / equality -------------------------------------------------

Block::Block(const Block& other)
    : op(other.op), fields(other.fields), body(other.body), else_body(other.else_body) {
    args.reserve(other.args.size());
    for (const auto& a : other.args) {
        if (const Value* v = std::get_if<Value>(&a))
            args.emplace_back(*v);
        else
            args.emplace_back(std::make_unique<Block>(*std::get<std::unique_ptr<Block>>(a)));
    }
}

Block& Block::operator=(const Block& other) {
    if (this != &other) {
        Block copy(other);
        *this = std::move(copy);
    }
    return *this;
}

bool Block::operator==(const Block& other) const {
    if (op != other.op || fields != other.fields || body != other.body ||
        else_body != other.else_body || args.size() != other.args.size())
        return false;
    for (size_t i = 0; i < args.size(); ++i) {
        const Value* va = std::get_if<Value>(&args[i]);
        const Value* vb = std::get_if<Value>(&other.args[i]);
        if ((va == nullptr) != (vb == nullptr)) return false;
        if (va) {
            if (*va != *vb) return false;
        } else if (!(*std::get<std::unique_ptr<Block>>(args[i]) ==
                     *std::get<std::unique_ptr<Block>>(other.args[i]))) {
            return false;
        }
    }
    return true;
}

// --- parsing ---------------------------------------------------------------

ParseError::ParseError(const std::string& msg, int line, int column)
    : Error("parse error at line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + msg),
      line(line),
      column(column) {}

SchemaError::SchemaError(const std::string& path, const std::string& msg)
    : Error("L0 at " + path + ": " + msg), path(path) {}

namespace {

[[noreturn]] void schema_fail(const BlockPath& path, const std::string& msg) {
    throw SchemaError(path.str(), msg);
}

Value literal_from_json(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return j.get<bool>();
    return j.get<double>();
}

Block parse_block(const json& j, const BlockPath& path, BlockShape expected);

std::vector<Block> parse_statement_list(const json& j, const BlockPath& parent,
                                        PathStep::Kind kind) {
    std::vector<Block> out;
    if (!j.is_array()) schema_fail(parent, "statement list must be an array");
    int i = 0;
    for (const auto& item : j) {
        out.push_back(parse_block(item, parent.child(kind, i), BlockShape::Statement));
        ++i;
    }
    return out;
}

Block parse_block(const json& j, const BlockPath& path, BlockShape expected) {
    if (!j.is_object()) schema_fail(path, "block must be a JSON object");
    if (!j.contains("op") || !j.at("op").is_string())
        schema_fail(path, "block is missing a string \"op\"");
    Block block;
    block.op = j.at("op").get<std::string>();
    const OpInfo* info = find_op(block.op);
    if (!info) schema_fail(path, "unknown opcode \"" + block.op + "\"");
    if (info->shape != expected) {
        const char* want = expected == BlockShape::Hat         ? "hat"
                           : expected == BlockShape::Statement ? "statement"
                                                               : "reporter";
        schema_fail(path, "opcode \"" + block.op + "\" is not valid in " +
                              std::string(want) + " position");
    }

    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key == "op") continue;
        if (key == "fields") {
            if (!it.value().is_object()) schema_fail(path, "\"fields\" must be an object");
            for (auto f = it.value().begin(); f != it.value().end(); ++f) {
                if (!f.value().is_string())
                    schema_fail(path, "field \"" + f.key() + "\" must be a string");
                block.fields[f.key()] = f.value().get<std::string>();
            }
            continue;
        }
        if (key == "args") {
            if (!it.value().is_array()) schema_fail(path, "\"args\" must be an array");
            int i = 0;
            for (const auto& a : it.value()) {
                if (a.is_object()) {
                    block.args.emplace_back(std::make_unique<Block>(
                        parse_block(a, path.child(PathStep::Arg, i), BlockShape::Reporter)));
                } else if (a.is_string() || a.is_boolean() || a.is_number()) {
                    block.args.emplace_back(literal_from_json(a));
                } else {
                    schema_fail(path.child(PathStep::Arg, i),
                                "argument must be a block or a string/number/boolean literal");
                }
                ++i;
            }
            continue;
        }
        if (key == "body") {
            if (!info->has_body) schema_fail(path, "unexpected \"body\" for op " + block.op);
            block.body = parse_statement_list(it.value(), path, PathStep::Body);
            continue;
        }
        if (key == "else") {
            if (!info->has_else) schema_fail(path, "unexpected \"else\" for op " + block.op);
            block.else_body = parse_statement_list(it.value(), path, PathStep::Else);
            continue;
        }
        schema_fail(path, "unexpected key \"" + key + "\" for op " + block.op);
    }

    if (static_cast<int>(block.args.size()) != info->arity)
        schema_fail(path, "op " + block.op + " takes " + std::to_string(info->arity) +
                              " argument(s), got " + std::to_string(block.args.size()));
    for (const auto& name : info->field_names) {
        auto it = block.fields.find(name);
        if (it == block.fields.end())
            schema_fail(path, "op " + block.op + " requires field \"" + name + "\"");
        if (!field_value_allowed(block.op, name, it->second))
            schema_fail(path, "op " + block.op + " field \"" + name +
                                  "\" has invalid value \"" + it->second + "\"");
    }
    if (block.fields.size() != info->field_names.size())
        for (const auto& [name, _] : block.fields)
            if (std::find(info->field_names.begin(), info->field_names.end(), name) ==
                info->field_names.end())
                schema_fail(path, "unexpected field \"" + name + "\" for op " + block.op);
    if (info->has_body && !j.contains("body"))
        schema_fail(path, "op " + block.op + " requires a \"body\" list");
    if (info->has_else && !j.contains("else"))
        schema_fail(path, "op " + block.op + " requires an \"else\" list");
    return block;
}

// Collects every variable reference under a block so declarations can be
// checked sprite-wide.
void collect_var_refs(const Block& block, const BlockPath& path,
                      std::vector<std::pair<std::string, BlockPath>>& out) {
    if (block.op == "set_var" || block.op == "change_var" || block.op == "var")
        out.emplace_back(block.fields.at("name"), path);
    int i = 0;
    for (const auto& a : block.args) {
        if (const auto* child = std::get_if<std::unique_ptr<Block>>(&a))
            collect_var_refs(**child, path.child(PathStep::Arg, i), out);
        ++i;
    }
    for (size_t b = 0; b < block.body.size(); ++b)
        collect_var_refs(block.body[b], path.child(PathStep::Body, static_cast<int>(b)), out);
    for (size_t e = 0; e < block.else_body.size(); ++e)
        collect_var_refs(block.else_body[e], path.child(PathStep::Else, static_cast<int>(e)),
                         out);
}

void compute_line_column(const std::string& text, size_t byte, int* line, int* column) {
    *line = 1;
    *column = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++*line;
            *column = 1;
        } else {
            ++*column;
        }
    }
}

}  // namespace

Program parse_program(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 0, column = 0;
        compute_line_column(text, e.byte > 0 ? e.byte - 1 : 0, &line, &column);
        throw ParseError(e.what(), line, column);
    }

    BlockPath root;
    if (!doc.is_object()) schema_fail(root, "program must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "sprites" && it.key() != "cloud_project_id")
            schema_fail(root, "unexpected top-level key \"" + it.key() + "\"");
    if (!doc.contains("sprites") || !doc.at("sprites").is_array())
        schema_fail(root, "program requires a \"sprites\" array");

    Program program;
    if (doc.contains("cloud_project_id")) {
        if (!doc.at("cloud_project_id").is_number_integer() ||
            doc.at("cloud_project_id").get<long long>() <= 0)
            schema_fail(root, "\"cloud_project_id\" must be a positive integer");
        program.cloud_project_id = doc.at("cloud_project_id").get<long long>();
    }

    std::set<std::string> sprite_names;
    int sprite_idx = 0;
    for (const auto& js : doc.at("sprites")) {
        BlockPath spath;
        spath.sprite = sprite_idx;
        spath.script = 0;
        if (!js.is_object() || !js.contains("name") || !js.at("name").is_string())
            schema_fail(spath, "sprite requires a string \"name\"");
        Sprite sprite;
        sprite.name = js.at("name").get<std::string>();
        if (sprite.name.empty()) schema_fail(spath, "sprite name must be nonempty");
        if (!sprite_names.insert(sprite.name).second)
            schema_fail(spath, "duplicate sprite name \"" + sprite.name + "\"");

        for (auto it = js.begin(); it != js.end(); ++it)
            if (it.key() != "name" && it.key() != "variables" && it.key() != "scripts")
                schema_fail(spath, "unexpected sprite key \"" + it.key() + "\"");

        std::set<std::string> var_names;
        if (js.contains("variables")) {
            if (!js.at("variables").is_array())
                schema_fail(spath, "\"variables\" must be an array");
            for (const auto& jv : js.at("variables")) {
                if (!jv.is_object() || !jv.contains("name") || !jv.at("name").is_string())
                    schema_fail(spath, "variable requires a string \"name\"");
                VariableDecl decl;
                decl.name = jv.at("name").get<std::string>();
                if (decl.name.empty()) schema_fail(spath, "variable name must be nonempty");
                if (!var_names.insert(decl.name).second)
                    schema_fail(spath, "duplicate variable \"" + decl.name + "\" in sprite \"" +
                                           sprite.name + "\"");
                if (jv.contains("cloud")) {
                    if (!jv.at("cloud").is_boolean())
                        schema_fail(spath, "variable \"cloud\" must be a boolean");
                    decl.cloud = jv.at("cloud").get<bool>();
                }
                if (jv.contains("init")) {
                    if (!jv.at("init").is_number())
                        schema_fail(spath, "variable \"init\" must be a number");
                    decl.init = jv.at("init").get<double>();
                }
                for (auto it = jv.begin(); it != jv.end(); ++it)
                    if (it.key() != "name" && it.key() != "cloud" && it.key() != "init")
                        schema_fail(spath, "unexpected variable key \"" + it.key() + "\"");
                if (decl.cloud && !program.cloud_project_id)
                    schema_fail(spath, "cloud variable \"" + decl.name +
                                           "\" requires a program cloud_project_id");
                sprite.variables.push_back(std::move(decl));
            }
        }

        if (js.contains("scripts")) {
            if (!js.at("scripts").is_array()) schema_fail(spath, "\"scripts\" must be an array");
            int script_idx = 0;
            for (const auto& jsc : js.at("scripts")) {
                BlockPath cpath;
                cpath.sprite = sprite_idx;
                cpath.script = script_idx;
                if (!jsc.is_object() || !jsc.contains("hat") || !jsc.contains("body"))
                    schema_fail(cpath, "script requires \"hat\" and \"body\"");
                for (auto it = jsc.begin(); it != jsc.end(); ++it)
                    if (it.key() != "hat" && it.key() != "body")
                        schema_fail(cpath, "unexpected script key \"" + it.key() + "\"");
                Script script;
                script.hat =
                    parse_block(jsc.at("hat"), cpath.child(PathStep::Hat, 0), BlockShape::Hat);
                script.body = parse_statement_list(jsc.at("body"), cpath, PathStep::Body);
                sprite.scripts.push_back(std::move(script));
                ++script_idx;
            }
        }

        // Variable references must name a declaration on the same sprite.
        std::vector<std::pair<std::string, BlockPath>> refs;
        for (size_t sc = 0; sc < sprite.scripts.size(); ++sc) {
            BlockPath cpath;
            cpath.sprite = sprite_idx;
            cpath.script = static_cast<int>(sc);
            for (size_t b = 0; b < sprite.scripts[sc].body.size(); ++b)
                collect_var_refs(sprite.scripts[sc].body[b],
                                 cpath.child(PathStep::Body, static_cast<int>(b)), refs);
        }
        for (const auto& [name, rpath] : refs)
            if (!var_names.count(name))
                schema_fail(rpath, "variable \"" + name + "\" is not declared in sprite \"" +
                                       sprite.name + "\"");

        program.sprites.push_back(std::move(sprite));
        ++sprite_idx;
    }

    if (program.sprites.empty()) schema_fail(root, "program requires at least one sprite");
    return program;
}

// --- serialization -----------------------------------------------------

namespace {

json number_to_json(double d) {
    if (d == std::floor(d) && std::abs(d) < 9.007199254740992e15 && std::isfinite(d))
        return json(static_cast<long long>(d));
    return json(d);
}

json block_to_json(const Block& block) {
    const OpInfo* info = find_op(block.op);
    json j;
    j["op"] = block.op;
    if (!block.fields.empty()) {
        json f = json::object();
        for (const auto& [k, v] : block.fields) f[k] = v;
        j["fields"] = f;
    }
    if (!block.args.empty()) {
        json a = json::array();
        for (const auto& arg : block.args) {
            if (const Value* v = std::get_if<Value>(&arg)) {
                if (const double* d = std::get_if<double>(v))
                    a.push_back(number_to_json(*d));
                else if (const bool* b = std::get_if<bool>(v))
                    a.push_back(*b);
                else
                    a.push_back(std::get<std::string>(*v));
            } else {
                a.push_back(block_to_json(*std::get<std::unique_ptr<Block>>(arg)));
            }
        }
        j["args"] = a;
    }
    if (info && info->has_body) {
        json b = json::array();
        for (const auto& s : block.body) b.push_back(block_to_json(s));
        j["body"] = b;
    }
    if (info && info->has_else) {
        json e = json::array();
        for (const auto& s : block.else_body) e.push_back(block_to_json(s));
        j["else"] = e;
    }
    return j;
}

}  // namespace

std::string serialize_program(const Program& program) {
    json j;
    if (program.cloud_project_id) j["cloud_project_id"] = *program.cloud_project_id;
    json sprites = json::array();
    for (const auto& sprite : program.sprites) {
        json js;
        js["name"] = sprite.name;
        if (!sprite.variables.empty()) {
            json vars = json::array();
            for (const auto& v : sprite.variables) {
                json jv;
                jv["name"] = v.name;
                jv["cloud"] = v.cloud;
                jv["init"] = number_to_json(v.init);
                vars.push_back(jv);
            }
            js["variables"] = vars;
        }
        json scripts = json::array();
        for (const auto& script : sprite.scripts) {
            json jsc;
            jsc["hat"] = block_to_json(script.hat);
            json body = json::array();
            for (const auto& b : script.body) body.push_back(block_to_json(b));
            jsc["body"] = body;
            scripts.push_back(jsc);
        }
        js["scripts"] = scripts;
        sprites.push_back(js);
    }
    j["sprites"] = sprites;
    return j.dump(2) + "\n";
}

}  // namespace scb
