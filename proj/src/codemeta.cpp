#include "scb/codemeta.hpp"

#include "json.hpp"

namespace scb {

namespace {

void count_block(const Block& block, CodeMeta& meta) {
    ++meta.opcode_counts[block.op];
    for (const auto& arg : block.args)
        if (const auto* child = std::get_if<std::unique_ptr<Block>>(&arg))
            count_block(**child, meta);
    for (const auto& b : block.body) count_block(b, meta);
    for (const auto& b : block.else_body) count_block(b, meta);
}

}  // namespace

CodeMeta code_metadata(const Program& program) {
    CodeMeta meta;
    for (const auto& sprite : program.sprites)
        for (const auto& script : sprite.scripts)
            for (const auto& block : script.body) count_block(block, meta);
    for (const auto& [op, count] : meta.opcode_counts)
        if (count > 0) meta.categories.insert(category_of(op));
    return meta;
}

std::string code_meta_to_json(const CodeMeta& meta) {
    nlohmann::json j;
    j["opcode_counts"] = nlohmann::json::object();
    for (const auto& [op, count] : meta.opcode_counts) j["opcode_counts"][op] = count;
    j["categories"] = nlohmann::json::array();
    for (const auto& cat : meta.categories) j["categories"].push_back(cat);
    return j.dump();
}

}  // namespace scb
