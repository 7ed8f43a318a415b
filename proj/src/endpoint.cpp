#include "tidygrid/endpoint.hpp"

#include <httplib.h>
#include <json.hpp>

#include "tidygrid/base.hpp"

namespace tidygrid {

std::optional<std::string> request_completion(const EndpointConfig& config,
                                              const std::string& prompt, std::string* error) {
    httplib::Client client(config.host, config.port);
    const time_t sec = config.timeout_ms / 1000;
    const time_t usec = (config.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);

    nlohmann::json body;
    body["prompt"] = prompt;
    body["temperature"] = config.temperature;

    auto res = client.Post(config.path, body.dump(), "application/json");
    if (!res) {
        if (error) *error = "transport error: " + httplib::to_string(res.error());
        return std::nullopt;
    }
    if (res->status != 200) {
        if (error) *error = "endpoint returned HTTP " + std::to_string(res->status);
        return std::nullopt;
    }
    try {
        nlohmann::json j = nlohmann::json::parse(res->body);
        if (j.is_object() && j.contains("text") && j["text"].is_string()) {
            return j["text"].get<std::string>();
        }
    } catch (const nlohmann::json::parse_error&) {
        // Raw-text completion body; the plan parser is total either way.
    }
    return res->body;
}

std::optional<PlanProposal> EndpointPlanner::propose(const PlannerContext& ctx,
                                                     std::uint64_t seed) {
    (void)seed;  // sampling randomness lives on the remote side
    std::string error;
    std::optional<std::string> text = request_completion(config_, ctx.prompt, &error);
    if (!text) {
        PlanProposal failed;
        failed.error = error;
        return failed;
    }
    return proposal_from_response(*text);
}

Plan endpoint_plan(const PlannerContext& ctx, const EndpointConfig& config) {
    std::string error;
    std::optional<std::string> text = request_completion(config, ctx.prompt, &error);
    if (!text) throw IoError("endpoint planner failed: " + error);
    return proposal_from_response(*text).plan;
}

}  // namespace tidygrid
