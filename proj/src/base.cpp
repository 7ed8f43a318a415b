#include "tidygrid/base.hpp"

namespace tidygrid {

Cell heading_vec(Heading h) {
    switch (h) {
        case Heading::north: return {0, -1};
        case Heading::east: return {1, 0};
        case Heading::south: return {0, 1};
        case Heading::west: return {-1, 0};
    }
    return {0, 0};
}

Heading turned_left(Heading h) {
    switch (h) {
        case Heading::north: return Heading::west;
        case Heading::west: return Heading::south;
        case Heading::south: return Heading::east;
        case Heading::east: return Heading::north;
    }
    return h;
}

Heading turned_right(Heading h) {
    switch (h) {
        case Heading::north: return Heading::east;
        case Heading::east: return Heading::south;
        case Heading::south: return Heading::west;
        case Heading::west: return Heading::north;
    }
    return h;
}

std::string to_string(Heading h) {
    switch (h) {
        case Heading::north: return "N";
        case Heading::east: return "E";
        case Heading::south: return "S";
        case Heading::west: return "W";
    }
    return "?";
}

std::string to_string(Gaze g) {
    switch (g) {
        case Gaze::down: return "down";
        case Gaze::level: return "level";
        case Gaze::up: return "up";
    }
    return "?";
}

std::string to_string(Tier t) {
    switch (t) {
        case Tier::low: return "low";
        case Tier::mid: return "mid";
        case Tier::high: return "high";
    }
    return "?";
}

Tier tier_from_string(const std::string& s) {
    if (s == "low") return Tier::low;
    if (s == "mid") return Tier::mid;
    if (s == "high") return Tier::high;
    throw ParseError("invalid tier '" + s + "' (expected low|mid|high)");
}

Gaze gaze_from_string(const std::string& s) {
    if (s == "down") return Gaze::down;
    if (s == "level") return Gaze::level;
    if (s == "up") return Gaze::up;
    throw ParseError("invalid gaze '" + s + "'");
}

Heading heading_from_string(const std::string& s) {
    if (s == "N") return Heading::north;
    if (s == "E") return Heading::east;
    if (s == "S") return Heading::south;
    if (s == "W") return Heading::west;
    throw ParseError("invalid heading '" + s + "'");
}

Gaze gaze_for_tier(Tier t) {
    switch (t) {
        case Tier::low: return Gaze::down;
        case Tier::mid: return Gaze::level;
        case Tier::high: return Gaze::up;
    }
    return Gaze::level;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = fnv1a64(label);
    // splitmix64 finalizer over the combined value
    std::uint64_t z = seed ^ (h + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view label, std::uint64_t n) {
    return mix_seed(mix_seed(seed, label) + n * 0x9e3779b97f4a7c15ULL, label);
}

std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

double uniform_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    return static_cast<std::size_t>(uniform_double(rng) * static_cast<double>(n));
}

}  // namespace tidygrid
