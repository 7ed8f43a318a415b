#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tidygrid/base.hpp"

namespace tidygrid {

// Display-name conventions:
//   object     "<obj_type> <obj_index>"                 e.g. "laptop 1"
//   room       "<room_type> <room_index>"               e.g. "living room 0"
//   receptacle "<room name> <rec_type> <rec_index>"     e.g. "kitchen 0 table 6"
// obj_type and rec_type are single tokens; room_type may span several tokens.
// No type token may equal "on" (reserved by the plan grammar), so parsing from
// the right is unambiguous and rendered names round-trip exactly.

struct ObjectName {
    std::string obj_type;
    int index = 0;

    std::string str() const;
    friend bool operator==(const ObjectName&, const ObjectName&) = default;
};

struct RoomName {
    std::string room_type;
    int index = 0;

    std::string str() const;
    friend bool operator==(const RoomName&, const RoomName&) = default;
};

struct ReceptacleName {
    RoomName room;
    std::string rec_type;
    int index = 0;

    std::string str() const;
    friend bool operator==(const ReceptacleName&, const ReceptacleName&) = default;
};

// A valid type token: nonempty, [a-z0-9'] with a leading letter, not "on".
bool valid_type_token(const std::string& token);
// Room types are one or more valid type tokens separated by single spaces.
bool valid_room_type(const std::string& room_type);

std::vector<std::string> split_tokens(const std::string& text);

std::optional<ObjectName> try_parse_object_name(const std::string& text);
std::optional<RoomName> try_parse_room_name(const std::string& text);
std::optional<ReceptacleName> try_parse_receptacle_name(const std::string& text);

// Throwing variants; raise ParseError naming the offending text.
ObjectName parse_object_name(const std::string& text);
RoomName parse_room_name(const std::string& text);
ReceptacleName parse_receptacle_name(const std::string& text);

}  // namespace tidygrid
