#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <semaphore>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "simgym/agent.hpp"
#include "simgym/errors.hpp"
#include "simgym/persona.hpp"

namespace simgym {

struct RemoteEndpointConfig {
  std::string base_url;                       // e.g. http://localhost:8080
  std::string path = "/v1/chat/completions";
  std::string model = "simgym-agent";
  std::string api_key_env = "SIMGYM_API_KEY"; // credentials come from the environment only
  int timeout_s = 30;
  int max_retries = 2;
  int max_in_flight = 8; // global cap on concurrent requests per client
};

namespace detail {

// counting gate shared by all threads using one remote client
class InFlightGate {
public:
  explicit InFlightGate(int limit) : sem_(std::clamp(limit, 1, 256)) {}

  class Pass {
  public:
    explicit Pass(std::counting_semaphore<256>& sem) : sem_(sem) { sem_.acquire(); }
    ~Pass() { sem_.release(); }
    Pass(const Pass&) = delete;
    Pass& operator=(const Pass&) = delete;

  private:
    std::counting_semaphore<256>& sem_;
  };

  Pass enter() { return Pass(sem_); }

private:
  std::counting_semaphore<256> sem_;
};

} // namespace detail

namespace detail {

inline std::string api_key_from_env(const std::string& env_var) {
  const char* value = std::getenv(env_var.c_str());
  return value ? value : "";
}

// One chat-completion round trip; returns the first choice's message content.
inline std::string chat_complete(const RemoteEndpointConfig& config,
                                 const nlohmann::json& messages) {
  httplib::Client client(config.base_url);
  client.set_connection_timeout(config.timeout_s);
  client.set_read_timeout(config.timeout_s);

  httplib::Headers headers;
  const std::string key = api_key_from_env(config.api_key_env);
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

  const nlohmann::json body{{"model", config.model}, {"messages", messages}};
  auto res = client.Post(config.path, headers, body.dump(), "application/json");
  if (!res) throw BackendUnavailable("transport error: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw BackendUnavailable("endpoint returned status " + std::to_string(res->status));

  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendUnavailable(std::string("unparseable completion envelope: ") + e.what());
  }
}

} // namespace detail

// Text backend for Stage 2/5 structured outputs, speaking the same
// chat-completion wire format as the agent policy.
class RemoteTextBackend : public TextBackend {
public:
  explicit RemoteTextBackend(RemoteEndpointConfig config)
      : config_(std::move(config)), gate_(config_.max_in_flight) {}

  nlohmann::json complete(const nlohmann::json& request) override {
    const nlohmann::json messages = nlohmann::json::array(
        {{{"role", "system"},
          {"content", "Reply with a single JSON object matching the requested schema."}},
         {{"role", "user"}, {"content", request.dump()}}});
    const auto pass = gate_.enter();
    const std::string content = detail::chat_complete(config_, messages);
    try {
      return nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
      throw BackendUnavailable(std::string("reply is not valid JSON: ") + e.what());
    }
  }

private:
  RemoteEndpointConfig config_;
  detail::InFlightGate gate_;
};

namespace detail {

inline nlohmann::json context_payload(const PlanningContext& context) {
  nlohmann::json memory = nlohmann::json::array();
  for (const MemoryEntry& entry : context.memory_view)
    memory.push_back({{"step_index", entry.step_index},
                      {"observation", entry.observation_digest},
                      {"reasoning", entry.reasoning},
                      {"action", entry.action},
                      {"outcome",
                       entry.outcome == TransitionOutcome::ok ? "ok" : "execution_error"},
                      {"error_detail", entry.error_detail ? nlohmann::json(*entry.error_detail)
                                                          : nlohmann::json(nullptr)}});
  nlohmann::json observation{{"url", context.observation.url},
                             {"step_index", context.observation.step_index},
                             {"ax_tree", context.observation.ax_tree}};
  // the image slot stays empty in simulation; live deployments would attach it
  return nlohmann::json{{"goal", context.goal},
                        {"memory", memory},
                        {"observation", observation},
                        {"response_schema",
                         {{"reasoning", "string"},
                          {"terminate", "boolean"},
                          {"action", "object with kind, target_ref?, args?; omit when terminating"}}}};
}

inline std::optional<Decision> parse_decision_reply(const std::string& content,
                                                    std::string& error) {
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    error = std::string("decision is not valid JSON: ") + e.what();
    return std::nullopt;
  }
  if (!reply.is_object() || !reply.contains("terminate")) {
    error = "decision must be an object with a terminate flag";
    return std::nullopt;
  }
  Decision decision;
  try {
    decision.terminate = reply.at("terminate").get<bool>();
    if (reply.contains("reasoning")) decision.reasoning = reply["reasoning"].get<std::string>();
    if (reply.contains("action") && !reply["action"].is_null())
      decision.action = reply["action"].get<Action>();
  } catch (const std::exception& e) {
    error = std::string("malformed decision fields: ") + e.what();
    return std::nullopt;
  }
  if (decision.terminate == decision.action.has_value()) {
    error = "exactly one of terminate=true or a proposed action is required";
    return std::nullopt;
  }
  return decision;
}

} // namespace detail

// Chat-completion-backed decision policy. Each call sends the persona prompt,
// guardrail notice, and serialized planning context; parse or transport
// failures are retried with the error appended verbatim to the next request,
// then surface as PolicyFailure once retries run out.
class RemoteModelPolicy : public Policy {
public:
  explicit RemoteModelPolicy(RemoteEndpointConfig config)
      : config_(std::move(config)), gate_(config_.max_in_flight) {}

  Decision decide(const PlanningContext& context) override {
    const nlohmann::json payload = detail::context_payload(context);
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      nlohmann::json user = payload;
      if (!last_error.empty()) user["previous_error"] = last_error;
      const nlohmann::json messages = nlohmann::json::array(
          {{{"role", "system"},
            {"content", context.persona.prompt + "\n" + context.guardrail_notice}},
           {{"role", "user"}, {"content", user.dump()}}});
      std::string content;
      try {
        const auto pass = gate_.enter();
        content = detail::chat_complete(config_, messages);
      } catch (const BackendUnavailable& e) {
        last_error = e.what();
        continue;
      }
      if (auto decision = detail::parse_decision_reply(content, last_error)) return *decision;
    }
    throw PolicyFailure("remote policy retries exhausted: " + last_error);
  }

private:
  RemoteEndpointConfig config_;
  detail::InFlightGate gate_;
};

} // namespace simgym
