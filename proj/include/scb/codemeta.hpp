#pragma once

#include <map>
#include <set>
#include <string>

#include "scb/program.hpp"

namespace scb {

// Per-program block census: how many times each opcode occurs and which
// categories that implies. Hat blocks are structural and not counted.
struct CodeMeta {
    std::map<std::string, long long> opcode_counts;
    std::set<std::string> categories;

    long long count(const std::string& op) const {
        auto it = opcode_counts.find(op);
        return it == opcode_counts.end() ? 0 : it->second;
    }
    bool uses_category(const std::string& category) const {
        return categories.count(category) > 0;
    }
    bool operator==(const CodeMeta&) const = default;
};

// Walks every script of every sprite, counting statement and reporter
// blocks in bodies, else branches, and argument positions.
CodeMeta code_metadata(const Program& program);

// Canonical JSON rendering (sorted keys, compact). The code-meta endpoint
// returns exactly these bytes.
std::string code_meta_to_json(const CodeMeta& meta);

}  // namespace scb
