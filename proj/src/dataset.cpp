#include "tidygrid/dataset.hpp"

#include <sstream>

#include <json.hpp>

#include "tidygrid/base.hpp"
#include "tidygrid/io.hpp"
#include "tidygrid/names.hpp"

namespace tidygrid {

using nlohmann::json;

std::string to_string(Dataset::Kind kind) {
    switch (kind) {
        case Dataset::Kind::demo: return "demo";
        case Dataset::Kind::grow: return "grow";
        case Dataset::Kind::self_train: return "self_train";
    }
    throw ValidationError("unknown dataset kind");
}

Dataset::Kind dataset_kind_from_string(const std::string& s) {
    if (s == "demo") return Dataset::Kind::demo;
    if (s == "grow") return Dataset::Kind::grow;
    if (s == "self_train") return Dataset::Kind::self_train;
    throw ParseError("unknown dataset kind '" + s + "'");
}

std::string dataset_to_jsonl(const Dataset& dataset, bool include_reward) {
    std::ostringstream out;
    json header;
    header["dataset_kind"] = to_string(dataset.kind);
    header["scene_id"] = dataset.scene_id;
    header["seed"] = dataset.seed;
    header["iteration"] = dataset.iteration;
    out << header.dump() << "\n";

    for (const auto& rec : dataset.records) {
        json meta;
        meta["task_id"] = rec.task_id;
        meta["episode"] = rec.episode;
        meta["iteration"] = rec.iteration;
        meta["decision"] = json::parse(decision_to_json_text(rec.decision));
        meta["outcomes"] = rec.outcomes;
        meta["generated"] = rec.generated;
        meta["executed"] = rec.executed;

        json line;
        line["prompt"] = rec.prompt;
        line["completion"] = rec.response;
        if (include_reward) line["reward"] = rec.reward;
        line["meta"] = meta;
        out << line.dump() << "\n";
    }
    return out.str();
}

Dataset dataset_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Dataset dataset;
    bool saw_header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_json_text(line, "dataset line " + std::to_string(line_no));
        if (!saw_header) {
            if (!j.is_object() || !j.contains("dataset_kind")) {
                throw ParseError("dataset file must start with a header line");
            }
            dataset.kind = dataset_kind_from_string(j["dataset_kind"].get<std::string>());
            if (j.contains("scene_id")) dataset.scene_id = j["scene_id"].get<std::string>();
            if (j.contains("seed")) dataset.seed = j["seed"].get<std::uint64_t>();
            if (j.contains("iteration")) dataset.iteration = j["iteration"].get<int>();
            saw_header = true;
            continue;
        }
        InteractionRecord rec;
        if (!j.is_object() || !j.contains("prompt") || !j.contains("completion")) {
            throw ParseError("dataset line " + std::to_string(line_no) +
                             ": expected prompt and completion fields");
        }
        rec.prompt = j["prompt"].get<std::string>();
        rec.response = j["completion"].get<std::string>();
        if (j.contains("reward")) rec.reward = j["reward"].get<int>();
        if (j.contains("meta")) {
            const json& meta = j["meta"];
            if (meta.contains("task_id")) rec.task_id = meta["task_id"].get<std::string>();
            if (meta.contains("episode")) rec.episode = meta["episode"].get<int>();
            if (meta.contains("iteration")) rec.iteration = meta["iteration"].get<int>();
            if (meta.contains("decision")) {
                rec.decision = decision_from_json_text(meta["decision"].dump());
            }
            if (meta.contains("outcomes")) {
                rec.outcomes = meta["outcomes"].get<std::vector<std::string>>();
            }
            if (meta.contains("generated")) rec.generated = meta["generated"].get<int>();
            if (meta.contains("executed")) rec.executed = meta["executed"].get<int>();
        }
        dataset.records.push_back(std::move(rec));
    }
    if (!saw_header) throw ParseError("dataset file is empty (missing header line)");
    return dataset;
}

void export_finetune_jsonl(const Dataset& dataset, const std::string& path, bool include_reward) {
    write_file(path, dataset_to_jsonl(dataset, include_reward));
}

Dataset import_finetune_jsonl(const std::string& path) {
    return dataset_from_jsonl(read_file(path));
}

std::string format_outcome(const Movement& m) {
    return m.object + " moved from " + m.from + " to " + m.to;
}

Movement parse_outcome_string(const std::string& s) {
    const std::string moved_marker = " moved from ";
    const std::string to_marker = " to ";
    const std::size_t moved_at = s.find(moved_marker);
    if (moved_at == std::string::npos) {
        throw ParseError("malformed outcome string (no ' moved from '): " + s);
    }
    // Room types may contain arbitrary word tokens (including "to"), so scan
    // " to " splits from the right and take the first that yields two
    // well-formed receptacle names.
    const std::string rest = s.substr(moved_at + moved_marker.size());
    std::size_t pos = rest.rfind(to_marker);
    while (pos != std::string::npos) {
        const std::string from = rest.substr(0, pos);
        const std::string to = rest.substr(pos + to_marker.size());
        if (try_parse_receptacle_name(from) && try_parse_receptacle_name(to)) {
            return Movement{s.substr(0, moved_at), from, to};
        }
        pos = pos == 0 ? std::string::npos : rest.rfind(to_marker, pos - 1);
    }
    throw ParseError("malformed outcome string (no receptacle split): " + s);
}

int outcome_reward(const std::vector<std::string>& outcomes, const Scene& scene,
                   const PreferenceDataset& prefs) {
    std::string moved_object;
    int reward = 0;
    for (const auto& outcome : outcomes) {
        const Movement m = parse_outcome_string(outcome);
        if (!moved_object.empty() && moved_object != m.object) {
            throw ValidationError("ambiguous multi-move plan: outcomes move both " +
                                  moved_object + " and " + m.object);
        }
        moved_object = m.object;
        const int before = is_correct_placement(m.object, m.from, scene, prefs) ? 1 : 0;
        const int after = is_correct_placement(m.object, m.to, scene, prefs) ? 1 : 0;
        reward += after - before;
    }
    return reward;
}

DecisionDataset decision_pairs(const Dataset& dataset, const Scene& scene) {
    DecisionDataset pairs;
    pairs.reserve(dataset.records.size());
    for (const auto& rec : dataset.records) {
        SceneGraph graph = parse_prompt(rec.prompt);
        PlannerContext ctx = make_context(graph, scene, rec.iteration);
        pairs.emplace_back(std::move(ctx), rec.decision);
    }
    return pairs;
}

}  // namespace tidygrid
