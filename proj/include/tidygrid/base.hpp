#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tidygrid {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by Simulator::step once t reaches the horizon; the episode runner
// catches it to discard a plan that no longer fits the step budget.
struct HorizonExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum class Heading { north, east, south, west };
enum class Gaze { down, level, up };
enum class Tier { low, mid, high };

Cell heading_vec(Heading h);
Heading turned_left(Heading h);
Heading turned_right(Heading h);

std::string to_string(Heading h);
std::string to_string(Gaze g);
std::string to_string(Tier t);
Tier tier_from_string(const std::string& s);
Gaze gaze_from_string(const std::string& s);
Heading heading_from_string(const std::string& s);

// Gaze level that reveals the contents of a receptacle at the given tier.
Gaze gaze_for_tier(Tier t);

// FNV-1a, used for seed fan-out and manifest file hashes. Stable across
// platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view bytes);

// Derives a stage/episode seed from a parent seed and a label, so one master
// seed fans out into independent named streams.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view label);
std::uint64_t mix_seed(std::uint64_t seed, std::string_view label, std::uint64_t n);

std::mt19937_64 make_rng(std::uint64_t seed);

// Uniform draws built directly on the engine output so results do not depend
// on the standard library's distribution implementations.
double uniform_double(std::mt19937_64& rng);                  // [0, 1)
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);  // [0, n)

}  // namespace tidygrid
