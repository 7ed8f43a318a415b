#include "tidygrid/names.hpp"

#include <cctype>
#include <sstream>

namespace tidygrid {

namespace {

// Strict non-negative integer: digits only, no leading zeros except "0".
std::optional<int> parse_index(const std::string& token) {
    if (token.empty()) return std::nullopt;
    if (token.size() > 1 && token[0] == '0') return std::nullopt;
    long value = 0;
    for (char c : token) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        value = value * 10 + (c - '0');
        if (value > 1000000) return std::nullopt;
    }
    return static_cast<int>(value);
}

std::string join(const std::vector<std::string>& tokens, std::size_t first, std::size_t last) {
    std::string out;
    for (std::size_t i = first; i < last; ++i) {
        if (i > first) out += ' ';
        out += tokens[i];
    }
    return out;
}

}  // namespace

std::string ObjectName::str() const {
    return obj_type + " " + std::to_string(index);
}

std::string RoomName::str() const {
    return room_type + " " + std::to_string(index);
}

std::string ReceptacleName::str() const {
    return room.str() + " " + rec_type + " " + std::to_string(index);
}

bool valid_type_token(const std::string& token) {
    if (token.empty() || token == "on") return false;
    if (!std::islower(static_cast<unsigned char>(token[0]))) return false;
    for (char c : token) {
        bool ok = std::islower(static_cast<unsigned char>(c)) ||
                  std::isdigit(static_cast<unsigned char>(c)) || c == '\'';
        if (!ok) return false;
    }
    return true;
}

bool valid_room_type(const std::string& room_type) {
    auto tokens = split_tokens(room_type);
    if (tokens.empty()) return false;
    for (const auto& t : tokens) {
        if (!valid_type_token(t)) return false;
    }
    // Reject double spaces / leading or trailing space: rebuilt string must match.
    return join(tokens, 0, tokens.size()) == room_type;
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

std::optional<ObjectName> try_parse_object_name(const std::string& text) {
    auto tokens = split_tokens(text);
    if (tokens.size() != 2) return std::nullopt;
    auto idx = parse_index(tokens[1]);
    if (!idx || !valid_type_token(tokens[0])) return std::nullopt;
    return ObjectName{tokens[0], *idx};
}

std::optional<RoomName> try_parse_room_name(const std::string& text) {
    auto tokens = split_tokens(text);
    if (tokens.size() < 2) return std::nullopt;
    auto idx = parse_index(tokens.back());
    if (!idx) return std::nullopt;
    std::string room_type = join(tokens, 0, tokens.size() - 1);
    if (!valid_room_type(room_type)) return std::nullopt;
    return RoomName{room_type, *idx};
}

std::optional<ReceptacleName> try_parse_receptacle_name(const std::string& text) {
    auto tokens = split_tokens(text);
    if (tokens.size() < 4) return std::nullopt;
    auto rec_idx = parse_index(tokens.back());
    if (!rec_idx) return std::nullopt;
    const std::string& rec_type = tokens[tokens.size() - 2];
    if (!valid_type_token(rec_type)) return std::nullopt;
    auto room = try_parse_room_name(join(tokens, 0, tokens.size() - 2));
    if (!room) return std::nullopt;
    return ReceptacleName{*room, rec_type, *rec_idx};
}

ObjectName parse_object_name(const std::string& text) {
    auto parsed = try_parse_object_name(text);
    if (!parsed) throw ParseError("invalid object name '" + text + "'");
    return *parsed;
}

RoomName parse_room_name(const std::string& text) {
    auto parsed = try_parse_room_name(text);
    if (!parsed) throw ParseError("invalid room name '" + text + "'");
    return *parsed;
}

ReceptacleName parse_receptacle_name(const std::string& text) {
    auto parsed = try_parse_receptacle_name(text);
    if (!parsed) throw ParseError("invalid receptacle name '" + text + "'");
    return *parsed;
}

}  // namespace tidygrid
