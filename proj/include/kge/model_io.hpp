#pragma once

#include <string>
#include <utility>

#include "kge/model.hpp"
#include "kge/vocab.hpp"

namespace kge {

// Binary model format (all integers little-endian):
//   magic "KGEM" | u32 version (=1) | u8 model_kind | u32 m | u32 n |
//   u64 |E| | u64 |R| |
//   entity table, row-major f64 LE | relation table, row-major f64 LE |
//   u64 len + entity vocab dump | u64 len + relation vocab dump
// The vocab dumps use the "<index>\t<name>\n" text format.
void save_model(const std::string& path, const Model& model, const Vocab& vocab);
std::pair<Model, Vocab> load_model(const std::string& path);

}  // namespace kge
