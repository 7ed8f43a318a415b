#include "tidygrid/plan.hpp"

#include <cctype>
#include <sstream>

namespace tidygrid {

namespace {

std::string normalize(const std::string& fragment) {
    // Lowercase and collapse whitespace runs; names are single-spaced lowercase.
    std::string out;
    bool in_space = true;  // swallow leading whitespace
    for (char raw : fragment) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isspace(c)) {
            if (!in_space) out += ' ';
            in_space = true;
        } else {
            out += static_cast<char>(std::tolower(c));
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::string strip_list_marker(const std::string& fragment) {
    std::size_t i = 0;
    while (i < fragment.size() &&
           std::isspace(static_cast<unsigned char>(fragment[i]))) {
        ++i;
    }
    std::size_t start = i;
    if (i < fragment.size() && (fragment[i] == '-' || fragment[i] == '*')) {
        return fragment.substr(i + 1);
    }
    while (i < fragment.size() && std::isdigit(static_cast<unsigned char>(fragment[i]))) ++i;
    if (i > start && i < fragment.size() && (fragment[i] == '.' || fragment[i] == ')')) {
        return fragment.substr(i + 1);
    }
    return fragment.substr(start);
}

bool take_prefix(const std::string& text, const std::string& prefix, std::string& rest) {
    if (text.rfind(prefix, 0) != 0) return false;
    rest = text.substr(prefix.size());
    return true;
}

}  // namespace

std::string render_action(const HighLevelAction& action) {
    switch (action.verb) {
        case HighLevelAction::Verb::go_to: return "go to " + action.arg1;
        case HighLevelAction::Verb::look_at: return "look at " + action.arg1;
        case HighLevelAction::Verb::pick_up: return "pick up " + action.arg1;
        case HighLevelAction::Verb::place: return "place " + action.arg1 + " on " + action.arg2;
    }
    return "";
}

ParsedPlan parse_plan(const std::string& text) {
    ParsedPlan result;
    result.plan.source_text = text;

    std::vector<std::string> fragments;
    std::string current;
    for (char c : text) {
        if (c == ',' || c == '\n') {
            fragments.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    fragments.push_back(current);

    for (const std::string& raw : fragments) {
        if (static_cast<int>(result.plan.actions.size()) >= kMaxPlanLength) break;
        std::string fragment = normalize(strip_list_marker(raw));
        if (fragment.empty()) continue;  // blank between separators: not an action

        HighLevelAction action;
        std::string rest;
        if (take_prefix(fragment, "go to ", rest)) {
            action = {HighLevelAction::Verb::go_to, rest, ""};
        } else if (take_prefix(fragment, "look at ", rest)) {
            action = {HighLevelAction::Verb::look_at, rest, ""};
        } else if (take_prefix(fragment, "pick up ", rest)) {
            action = {HighLevelAction::Verb::pick_up, rest, ""};
        } else if (take_prefix(fragment, "place ", rest)) {
            auto on = rest.find(" on ");
            if (on == std::string::npos || on == 0 || on + 4 >= rest.size()) {
                result.skipped.push_back({fragment, "unrecognized verb form"});
                continue;
            }
            action = {HighLevelAction::Verb::place, rest.substr(0, on), rest.substr(on + 4)};
        } else {
            result.skipped.push_back({fragment, "unrecognized verb form"});
            continue;
        }
        if (action.arg1.empty()) {
            result.skipped.push_back({fragment, "missing argument"});
            continue;
        }
        result.plan.actions.push_back(std::move(action));
    }
    return result;
}

std::string render_plan(const Plan& plan) {
    std::ostringstream out;
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
        if (i > 0) out << ", ";
        out << render_action(plan.actions[i]);
    }
    return out.str();
}

}  // namespace tidygrid
