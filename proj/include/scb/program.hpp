#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scb/errors.hpp"
#include "scb/value.hpp"

namespace scb {

// --- opcode taxonomy ---------------------------------------------------

enum class BlockShape { Hat, Statement, Reporter };

struct OpInfo {
    std::string op;
    BlockShape shape;
    std::string category;
    int arity = 0;                          // expression slots
    std::vector<std::string> field_names;   // dropdown literals, in order
    bool has_body = false;
    bool has_else = false;
};

// The fixed opcode table. Order is stable (used for deterministic dumps).
const std::vector<OpInfo>& opcode_table();
const OpInfo* find_op(const std::string& op);
// Category of an opcode; total over the table.
const std::string& category_of(const std::string& op);
bool is_known_category(const std::string& category);
const std::vector<std::string>& category_names();

// Allowed values for enumerated dropdown fields (comm_foreach relation,
// accessor field names, comm_total kind).
bool field_value_allowed(const std::string& op, const std::string& field,
                         const std::string& value);

// --- block paths ---------------------------------------------------------

// Address of a block inside a program: sprite index, script index, then a
// chain of structural steps. Renders like "0/1/b2/a0".
struct PathStep {
    enum Kind { Hat, Body, Else, Arg } kind;
    int index = 0;
    friend auto operator<=>(const PathStep&, const PathStep&) = default;
};

struct BlockPath {
    int sprite = 0;
    int script = 0;
    std::vector<PathStep> steps;

    BlockPath child(PathStep::Kind kind, int index) const;
    std::string str() const;
    friend auto operator<=>(const BlockPath&, const BlockPath&) = default;
};

// --- AST -----------------------------------------------------------------

struct Block;
// Argument slot: literal or nested reporter block.
using Arg = std::variant<Value, std::unique_ptr<Block>>;

struct Block {
    std::string op;
    std::map<std::string, std::string> fields;
    std::vector<Arg> args;
    std::vector<Block> body;
    std::vector<Block> else_body;

    Block() = default;
    Block(const Block& other);
    Block& operator=(const Block& other);
    Block(Block&&) = default;
    Block& operator=(Block&&) = default;

    bool operator==(const Block& other) const;
};

struct Script {
    Block hat;
    std::vector<Block> body;
    bool operator==(const Script&) const = default;
};

struct VariableDecl {
    std::string name;
    bool cloud = false;
    double init = 0.0;
    bool operator==(const VariableDecl&) const = default;
};

struct Sprite {
    std::string name;
    std::vector<VariableDecl> variables;
    std::vector<Script> scripts;
    bool operator==(const Sprite&) const = default;
};

struct Program {
    std::vector<Sprite> sprites;
    std::optional<long long> cloud_project_id;
    bool operator==(const Program&) const = default;
};

// --- parse / serialize ---------------------------------------------------

// JSON syntax error, with 1-based line/column of the offending byte.
struct ParseError : Error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& msg, int line, int column);
};

// Structural (L0) violation: unknown opcode, bad arity, stray field, ...
struct SchemaError : Error {
    std::string path;
    SchemaError(const std::string& path, const std::string& msg);
};

Program parse_program(const std::string& text);

// Canonical rendering: sorted keys, two-space indent, integral numbers
// without a decimal point, empty containers explicit only where the grammar
// requires them. parse(serialize(p)) reproduces p exactly.
std::string serialize_program(const Program& program);

}  // namespace scb
