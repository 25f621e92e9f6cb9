#pragma once

#include <filesystem>
#include <future>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "chunkbench/chat.hpp"

namespace chunkbench {

// graded relevance of one retrieved chunk against one query's reference answer
struct Judgment {
    std::string query_id;
    std::string chunk_id;
    int gain = 0;  // 0 irrelevant, 1 partial, 2 full
    std::string reason;
    std::string judge_model;
    bool degraded = false;  // true when a fallback produced the gain
};

// rubric prompt sent to the judge; {answer} and {chunk_text} are the only
// substitution points and the query is never part of it
extern const char* const kJudgePromptTemplate;

std::string render_prompt(const std::string& answer, const std::string& chunk_text);

class Judge {
public:
    virtual ~Judge() = default;
    virtual const std::string& model_id() const = 0;
    // fills gain/reason/judge_model/degraded; caller attaches query and chunk
    // ids. Must be safe to call from several threads at once.
    virtual Judgment judge(const std::string& answer, const std::string& chunk_text) = 0;
};

// scores via a chat provider. Unparseable or out-of-range replies are retried
// twice; after the third failure the judgment degrades to gain 0. Transport
// errors are not absorbed: a ProviderError propagates to the caller.
class LlmJudge : public Judge {
public:
    explicit LlmJudge(std::shared_ptr<ChatProvider> provider, int max_attempts = 3);
    const std::string& model_id() const override { return provider_->model_id(); }
    Judgment judge(const std::string& answer, const std::string& chunk_text) override;

private:
    std::shared_ptr<ChatProvider> provider_;
    int max_attempts_;
};

// deterministic local judge: coverage of the answer's distinct lowercased
// tokens (length >= 3) by the chunk's, mapped onto the three-point scale
class MockJudge : public Judge {
public:
    explicit MockJudge(double full_threshold = 0.7, double partial_threshold = 0.3);
    const std::string& model_id() const override { return model_id_; }
    Judgment judge(const std::string& answer, const std::string& chunk_text) override;

private:
    double full_threshold_;
    double partial_threshold_;
    std::string model_id_ = "mock-judge";
};

// content-addressed judgment cache: in-memory map plus an append-only jsonl
// file, keyed by (judge_model, answer, chunk) hashes. Concurrent identical
// requests reach the inner judge once.
class CachingJudge : public Judge {
public:
    CachingJudge(std::shared_ptr<Judge> inner, std::filesystem::path cache_file = {});
    const std::string& model_id() const override { return inner_->model_id(); }
    Judgment judge(const std::string& answer, const std::string& chunk_text) override;

    std::size_t entries() const;

private:
    struct Entry {
        int gain;
        std::string reason;
        bool degraded;
    };
    Judgment from_entry(const Entry& e) const;

    std::shared_ptr<Judge> inner_;
    std::filesystem::path cache_file_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, Entry> memory_;
    std::unordered_map<std::string, std::shared_future<Entry>> in_flight_;
};

struct JudgeTask {
    std::string query_id;
    std::string chunk_id;
    std::string answer;
    std::string chunk_text;
};

// judges tasks with up to `workers` threads; results in input order. The
// first failure wins and is rethrown after all threads stop.
std::vector<Judgment> judge_batch(Judge& judge, const std::vector<JudgeTask>& tasks,
                                  std::size_t workers = 1);

}  // namespace chunkbench
