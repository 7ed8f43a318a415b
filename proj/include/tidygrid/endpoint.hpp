#pragma once

#include <optional>
#include <string>

#include "tidygrid/planner.hpp"

namespace tidygrid {

// Adapter for a hosted text-completion model. Wire format: POST {"prompt":
// ..., "temperature": ...} as JSON; the response is either a JSON object with
// a "text" field or a raw text body, fed to the plan parser either way.
struct EndpointConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string path = "/complete";
    double temperature = 1.0;
    int timeout_ms = 5000;
};

// One completion round-trip. Returns the completion text, or nothing with
// `error` filled on transport/HTTP failure.
std::optional<std::string> request_completion(const EndpointConfig& config,
                                              const std::string& prompt, std::string* error);

class EndpointPlanner : public Planner {
  public:
    explicit EndpointPlanner(EndpointConfig config) : config_(std::move(config)) {}
    std::string name() const override { return "endpoint"; }
    std::optional<PlanProposal> propose(const PlannerContext& ctx, std::uint64_t seed) override;

  private:
    EndpointConfig config_;
};

// Free-function form; throws IoError on transport failure.
Plan endpoint_plan(const PlannerContext& ctx, const EndpointConfig& config);

}  // namespace tidygrid
