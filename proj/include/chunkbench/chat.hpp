#pragma once

#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace chunkbench {

// single-turn chat completion; implementations pin temperature=0, top_p=0.1
class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual const std::string& model_id() const = 0;
    virtual std::string complete(const std::string& prompt) = 0;  // thread-safe
};

// remote provider speaking POST {base}/chat/completions with
// {"model","messages":[{"role":"user","content":prompt}],"temperature":0,
//  "top_p":0.1}; returns the first choice's message content. 3 attempts with
// exponential backoff from 250 ms, then ProviderError.
class HttpChat : public ChatProvider {
public:
    HttpChat(std::string base_url, std::string api_key, std::string model_id);
    static std::unique_ptr<HttpChat> from_env();  // JUDGE_API_BASE/KEY/MODEL

    const std::string& model_id() const override { return model_id_; }
    std::string complete(const std::string& prompt) override;

private:
    std::string base_url_;
    std::string api_key_;
    std::string model_id_;
};

// canned responses in order; used to script exact transcripts in tests.
// With no default response an exhausted script throws.
class ScriptedChat : public ChatProvider {
public:
    explicit ScriptedChat(std::vector<std::string> responses, std::string default_response = "");
    const std::string& model_id() const override { return model_id_; }
    std::string complete(const std::string& prompt) override;

    std::vector<std::string> prompts() const;
    std::size_t calls() const;

private:
    mutable std::mutex mu_;
    std::deque<std::string> responses_;
    std::string default_response_;
    bool has_default_;
    std::vector<std::string> prompts_;
    std::string model_id_ = "scripted-chat";
};

// deterministic stand-in for a boundary-probing model: parses the two segments
// out of the boundary prompt and answers {"p": 1 - cosine} using the hashed
// 3-gram mock embedding, so dissimilar neighbours get high boundary scores
class MockBoundaryChat : public ChatProvider {
public:
    explicit MockBoundaryChat(std::size_t dim = 64);
    const std::string& model_id() const override { return model_id_; }
    std::string complete(const std::string& prompt) override;

private:
    std::size_t dim_;
    std::string model_id_ = "mock-boundary";
};

}  // namespace chunkbench
