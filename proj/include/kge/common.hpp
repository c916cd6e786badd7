#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace kge {

using Rng = std::mt19937_64;

// Error taxonomy. The CLI maps these to its exit-code contract: usage
// problems are caught before work starts (exit 2), everything thrown from
// the library is a data or numeric failure (exit 1).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VocabError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SpectralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(const void* data, std::size_t len);

// splitmix64-style mixer; derives independent stream seeds from
// (seed, salt, salt) tuples so workers/epochs never share an RNG stream.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace kge
