#include <sstream>

#include "tidygrid/graph.hpp"

namespace tidygrid {

namespace {

// These texts are part of the on-disk dataset format; change them only with a
// dataset version bump.
const char* const kInstructions =
    "INSTRUCTIONS\n"
    "You are a household robot in a partially explored house. Give me the next steps to "
    "explore the house and place misplaced objects on correct receptacles. Reply with one "
    "plan: a comma-separated sequence of high-level actions. Allowed forms: go to "
    "<room|receptacle|object>, look at <receptacle|object>, pick up <object>, place "
    "<object> on <receptacle>.\n";

const char* const kExamples =
    "EXAMPLES\n"
    "Example 1:\n"
    "State: two unvisited rooms, kitchen 0 and living room 0.\n"
    "Plan: go to kitchen 0, go to living room 0\n"
    "Example 2:\n"
    "State: pan 0 sits on kitchen 0 table 0 but belongs on kitchen 0 counter 0.\n"
    "Plan: go to pan 0, look at kitchen 0 table 0, pick up pan 0, go to kitchen 0 counter 0, "
    "look at kitchen 0 counter 0, place pan 0 on kitchen 0 counter 0\n";

const char* const kQuery =
    "QUERY\n"
    "Give the next plan as a comma-separated sequence of high-level actions.\n";

const char* const kHoldingPrefix = "You are holding: ";

}  // namespace

Prompt render_prompt(const SceneGraph& graph) {
    Prompt prompt;
    prompt.instructions = kInstructions;
    prompt.examples = kExamples;
    prompt.query = kQuery;

    std::ostringstream state;
    state << "CURRENT STATE\n";
    for (const auto& room : graph.rooms) {
        state << room.name << (room.visited ? " (visited)" : " (unvisited)") << "\n";
        for (const auto& [rec_name, node] : room.receptacles) {
            state << "  " << rec_name << ": ";
            if (!node.contents_known) {
                state << "contents unknown";
            } else {
                state << "[";
                for (std::size_t i = 0; i < node.objects.size(); ++i) {
                    if (i > 0) state << ", ";
                    state << node.objects[i];
                }
                state << "]";
            }
            state << "\n";
        }
    }
    state << kHoldingPrefix << (graph.held ? *graph.held : std::string("nothing")) << ".\n";
    prompt.state_description = state.str();

    prompt.rendered = prompt.instructions + "\n" + prompt.examples + "\n" +
                      prompt.state_description + "\n" + prompt.query;
    return prompt;
}

SceneGraph parse_prompt(const std::string& rendered) {
    const std::string marker = "CURRENT STATE\n";
    auto begin = rendered.find(marker);
    if (begin == std::string::npos) {
        throw ParseError("prompt has no CURRENT STATE section");
    }
    begin += marker.size();
    auto end = rendered.find("\nQUERY\n", begin);
    if (end == std::string::npos) end = rendered.size();

    SceneGraph graph;
    std::istringstream in(rendered.substr(begin, end - begin));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind(kHoldingPrefix, 0) == 0) {
            std::string held = line.substr(std::string(kHoldingPrefix).size());
            if (!held.empty() && held.back() == '.') held.pop_back();
            if (held != "nothing") graph.held = held;
            continue;
        }
        if (line.rfind("  ", 0) == 0) {
            if (graph.rooms.empty()) throw ParseError("receptacle line before any room: " + line);
            auto colon = line.find(": ");
            if (colon == std::string::npos) throw ParseError("malformed receptacle line: " + line);
            std::string rec_name = line.substr(2, colon - 2);
            std::string rest = line.substr(colon + 2);
            SceneGraph::RecNode node;
            if (rest == "contents unknown") {
                node.contents_known = false;
            } else if (rest.size() >= 2 && rest.front() == '[' && rest.back() == ']') {
                node.contents_known = true;
                std::string inner = rest.substr(1, rest.size() - 2);
                std::size_t pos = 0;
                while (pos < inner.size()) {
                    auto next = inner.find(", ", pos);
                    if (next == std::string::npos) next = inner.size();
                    node.objects.push_back(inner.substr(pos, next - pos));
                    pos = next == inner.size() ? next : next + 2;
                }
            } else {
                throw ParseError("malformed receptacle contents: " + line);
            }
            graph.rooms.back().receptacles[rec_name] = std::move(node);
            continue;
        }
        // Room line: "<name> (visited)" or "<name> (unvisited)".
        const std::string visited_tag = " (visited)";
        const std::string unvisited_tag = " (unvisited)";
        SceneGraph::RoomNode room;
        if (line.size() > visited_tag.size() &&
            line.compare(line.size() - visited_tag.size(), visited_tag.size(), visited_tag) == 0) {
            room.name = line.substr(0, line.size() - visited_tag.size());
            room.visited = true;
        } else if (line.size() > unvisited_tag.size() &&
                   line.compare(line.size() - unvisited_tag.size(), unvisited_tag.size(),
                                unvisited_tag) == 0) {
            room.name = line.substr(0, line.size() - unvisited_tag.size());
            room.visited = false;
        } else {
            throw ParseError("malformed room line in prompt: " + line);
        }
        graph.rooms.push_back(std::move(room));
    }
    if (graph.rooms.empty()) throw ParseError("prompt state lists no rooms");
    return graph;
}

}  // namespace tidygrid
