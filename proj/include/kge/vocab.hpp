#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kge/common.hpp"

namespace kge {

// Entity/relation symbol tables. Ids are dense, 0-based, assigned in
// first-seen order and stable across save/load.
class Vocab {
public:
    std::uint32_t add_entity(const std::string& name);
    std::uint32_t add_relation(const std::string& name);

    std::optional<std::uint32_t> entity_id(const std::string& name) const;
    std::optional<std::uint32_t> relation_id(const std::string& name) const;

    const std::string& entity_name(std::uint32_t id) const;
    const std::string& relation_name(std::uint32_t id) const;

    std::size_t num_entities() const { return entity_names_.size(); }
    std::size_t num_relations() const { return relation_names_.size(); }

    // "<index>\t<name>\n" dumps, one text blob per symbol table.
    std::string entities_text() const;
    std::string relations_text() const;
    static Vocab from_text(const std::string& entities, const std::string& relations);

    void save(const std::string& entities_path, const std::string& relations_path) const;
    static Vocab load(const std::string& entities_path, const std::string& relations_path);

    bool operator==(const Vocab& other) const {
        return entity_names_ == other.entity_names_ &&
               relation_names_ == other.relation_names_;
    }

private:
    std::vector<std::string> entity_names_;
    std::vector<std::string> relation_names_;
    std::unordered_map<std::string, std::uint32_t> entity_ids_;
    std::unordered_map<std::string, std::uint32_t> relation_ids_;
};

}  // namespace kge
