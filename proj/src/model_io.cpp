#include "kge/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace kge {

namespace {

constexpr char kMagic[4] = {'K', 'G', 'E', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ofstream& out, const void* p, std::size_t len) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
}

void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; i++) b[i] = static_cast<unsigned char>(v >> (8 * i));
    put_bytes(out, b, 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; i++) b[i] = static_cast<unsigned char>(v >> (8 * i));
    put_bytes(out, b, 8);
}

void put_f64(std::ofstream& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void get_bytes(std::ifstream& in, void* p, std::size_t len, const std::string& path) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(len));
    if (in.gcount() != static_cast<std::streamsize>(len))
        throw IoError(path + ": truncated model file");
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
    unsigned char b[4];
    get_bytes(in, b, 4, path);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; i++) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t get_u64(std::ifstream& in, const std::string& path) {
    unsigned char b[8];
    get_bytes(in, b, 8, path);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; i++) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::ifstream& in, const std::string& path) {
    return std::bit_cast<double>(get_u64(in, path));
}

void put_blob(std::ofstream& out, const std::string& text) {
    put_u64(out, text.size());
    put_bytes(out, text.data(), text.size());
}

std::string get_blob(std::ifstream& in, const std::string& path) {
    const std::uint64_t len = get_u64(in, path);
    if (len > (1ull << 32)) throw IoError(path + ": unreasonable vocab blob size");
    std::string text(len, '\0');
    if (len) get_bytes(in, text.data(), len, path);
    return text;
}

}  // namespace

void save_model(const std::string& path, const Model& model, const Vocab& vocab) {
    if (vocab.num_entities() != model.num_entities() ||
        vocab.num_relations() != model.num_relations())
        throw DimensionError("save_model: vocab and table sizes disagree");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);

    put_bytes(out, kMagic, 4);
    put_u32(out, kVersion);
    const auto kind = static_cast<unsigned char>(model.config.kind);
    put_bytes(out, &kind, 1);
    put_u32(out, model.config.dim);
    put_u32(out, model.config.num_scalars);
    put_u64(out, model.num_entities());
    put_u64(out, model.num_relations());
    for (double v : model.entities.data) put_f64(out, v);
    for (double v : model.relations.data) put_f64(out, v);
    put_blob(out, vocab.entities_text());
    put_blob(out, vocab.relations_text());
    if (!out) throw IoError("short write to " + path);
}

std::pair<Model, Vocab> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    char magic[4];
    get_bytes(in, magic, 4, path);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(path + ": not a model file (bad magic)");
    const std::uint32_t version = get_u32(in, path);
    if (version != kVersion)
        throw IoError(path + ": unsupported format version " + std::to_string(version));

    unsigned char kind_byte;
    get_bytes(in, &kind_byte, 1, path);
    if (kind_byte > 3) throw IoError(path + ": bad model kind byte");

    Model model;
    model.config.kind = static_cast<ModelKind>(kind_byte);
    model.config.dim = get_u32(in, path);
    model.config.num_scalars = get_u32(in, path);
    const std::uint64_t ne = get_u64(in, path);
    const std::uint64_t nr = get_u64(in, path);
    model.config.validate();
    if (ne == 0 || nr == 0 || ne > (1ull << 40) || nr > (1ull << 40) ||
        model.config.dim > (1u << 24))
        throw IoError(path + ": unreasonable table sizes");

    model.entities = EntityTable(ne, model.config.dim);
    model.relations = RelationTable(nr, model.config.dim);
    for (auto& v : model.entities.data) v = get_f64(in, path);
    for (auto& v : model.relations.data) v = get_f64(in, path);

    const std::string etext = get_blob(in, path);
    const std::string rtext = get_blob(in, path);
    Vocab vocab = Vocab::from_text(etext, rtext);
    if (vocab.num_entities() != ne || vocab.num_relations() != nr)
        throw IoError(path + ": vocab dumps disagree with table sizes");
    return {std::move(model), std::move(vocab)};
}

}  // namespace kge
