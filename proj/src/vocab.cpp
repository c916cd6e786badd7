#include "kge/vocab.hpp"

#include <fstream>
#include <sstream>

namespace kge {

namespace {

std::uint32_t add_symbol(const std::string& name, std::vector<std::string>& names,
                         std::unordered_map<std::string, std::uint32_t>& ids) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(names.size());
    names.push_back(name);
    ids.emplace(name, id);
    return id;
}

std::string dump_symbols(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); i++) {
        out += std::to_string(i);
        out += '\t';
        out += names[i];
        out += '\n';
    }
    return out;
}

std::vector<std::string> parse_symbols(const std::string& text, const char* what) {
    std::vector<std::string> names;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError(std::string(what) + " dump line " + std::to_string(lineno) +
                             ": expected <index>\\t<name>");
        const std::string idx = line.substr(0, tab);
        if (idx != std::to_string(names.size()))
            throw ParseError(std::string(what) + " dump line " + std::to_string(lineno) +
                             ": non-dense index '" + idx + "'");
        names.push_back(line.substr(tab + 1));
    }
    return names;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("short write to " + path);
}

}  // namespace

std::uint32_t Vocab::add_entity(const std::string& name) {
    return add_symbol(name, entity_names_, entity_ids_);
}

std::uint32_t Vocab::add_relation(const std::string& name) {
    return add_symbol(name, relation_names_, relation_ids_);
}

std::optional<std::uint32_t> Vocab::entity_id(const std::string& name) const {
    auto it = entity_ids_.find(name);
    if (it == entity_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> Vocab::relation_id(const std::string& name) const {
    auto it = relation_ids_.find(name);
    if (it == relation_ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vocab::entity_name(std::uint32_t id) const {
    if (id >= entity_names_.size()) throw VocabError("entity id out of range");
    return entity_names_[id];
}

const std::string& Vocab::relation_name(std::uint32_t id) const {
    if (id >= relation_names_.size()) throw VocabError("relation id out of range");
    return relation_names_[id];
}

std::string Vocab::entities_text() const { return dump_symbols(entity_names_); }
std::string Vocab::relations_text() const { return dump_symbols(relation_names_); }

Vocab Vocab::from_text(const std::string& entities, const std::string& relations) {
    Vocab v;
    for (const auto& name : parse_symbols(entities, "entity")) {
        if (v.entity_ids_.count(name))
            throw VocabError("duplicate entity name '" + name + "'");
        v.add_entity(name);
    }
    for (const auto& name : parse_symbols(relations, "relation")) {
        if (v.relation_ids_.count(name))
            throw VocabError("duplicate relation name '" + name + "'");
        v.add_relation(name);
    }
    return v;
}

void Vocab::save(const std::string& entities_path, const std::string& relations_path) const {
    write_file(entities_path, entities_text());
    write_file(relations_path, relations_text());
}

Vocab Vocab::load(const std::string& entities_path, const std::string& relations_path) {
    return from_text(read_file(entities_path), read_file(relations_path));
}

}  // namespace kge
