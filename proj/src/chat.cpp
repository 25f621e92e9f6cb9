#include "chunkbench/chat.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "http_util.hpp"

#include "chunkbench/embedding.hpp"
#include "chunkbench/errors.hpp"

namespace chunkbench {

HttpChat::HttpChat(std::string base_url, std::string api_key, std::string model_id)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), model_id_(std::move(model_id)) {
    if (base_url_.empty()) throw ConfigError("chat endpoint base url is empty");
    if (model_id_.empty()) throw ConfigError("chat model id is empty");
}

std::unique_ptr<HttpChat> HttpChat::from_env() {
    const char* base = std::getenv("JUDGE_API_BASE");
    const char* key = std::getenv("JUDGE_API_KEY");
    const char* model = std::getenv("JUDGE_MODEL");
    if (!base || !*base) throw ConfigError("JUDGE_API_BASE is not set");
    return std::make_unique<HttpChat>(base, key ? key : "",
                                      model && *model ? model
                                                      : "mistralai/mixtral-8x22b-instruct-v0.1");
}

std::string HttpChat::complete(const std::string& prompt) {
    nlohmann::json body = {
        {"model", model_id_},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", 0},
        {"top_p", 0.1},
    };
    nlohmann::json resp = detail::http_post_json(base_url_, "/chat/completions", api_key_, body);
    if (!resp.contains("choices") || !resp["choices"].is_array() || resp["choices"].empty())
        throw ProviderError("chat response has no choices");
    const auto& msg = resp["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") ||
        !msg["message"]["content"].is_string())
        throw ProviderError("chat response choice has no message content");
    return msg["message"]["content"].get<std::string>();
}

ScriptedChat::ScriptedChat(std::vector<std::string> responses, std::string default_response)
    : responses_(responses.begin(), responses.end()),
      default_response_(std::move(default_response)),
      has_default_(!default_response_.empty()) {}

std::string ScriptedChat::complete(const std::string& prompt) {
    std::lock_guard lock(mu_);
    prompts_.push_back(prompt);
    if (responses_.empty()) {
        if (has_default_) return default_response_;
        throw Error("scripted chat exhausted after " + std::to_string(prompts_.size() - 1) +
                    " responses");
    }
    std::string r = std::move(responses_.front());
    responses_.pop_front();
    return r;
}

std::vector<std::string> ScriptedChat::prompts() const {
    std::lock_guard lock(mu_);
    return prompts_;
}

std::size_t ScriptedChat::calls() const {
    std::lock_guard lock(mu_);
    return prompts_.size();
}

MockBoundaryChat::MockBoundaryChat(std::size_t dim) : dim_(dim) {}

std::string MockBoundaryChat::complete(const std::string& prompt) {
    static const std::string kAMark = "Segment A:\n";
    static const std::string kBMark = "\n\nSegment B:\n";
    static const std::string kEndMark = "\n\nEstimate";
    const auto a_pos = prompt.find(kAMark);
    const auto b_pos = prompt.find(kBMark, a_pos == std::string::npos ? 0 : a_pos);
    const auto end_pos = prompt.find(kEndMark, b_pos == std::string::npos ? 0 : b_pos);
    if (a_pos == std::string::npos || b_pos == std::string::npos || end_pos == std::string::npos)
        throw Error("boundary prompt did not match the expected template");
    const std::string a = prompt.substr(a_pos + kAMark.size(), b_pos - (a_pos + kAMark.size()));
    const std::string b = prompt.substr(b_pos + kBMark.size(), end_pos - (b_pos + kBMark.size()));
    double p = 1.0 - cosine_sim(mock_embed(a, dim_), mock_embed(b, dim_));
    p = std::clamp(p, 0.0, 1.0);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "{\"p\": %.6f}", p);
    return buf;
}

}  // namespace chunkbench
