#include "doctest.h"

#include <filesystem>
#include <memory>
#include <string>

#include "chunkbench/errors.hpp"
#include "chunkbench/judge.hpp"

using namespace chunkbench;

namespace {

const std::string kTemplate = kJudgePromptTemplate;

}  // namespace

TEST_CASE("prompt template carries the grading rubric verbatim") {
    CHECK(kTemplate.rfind("You are a strict information retrieval judge.", 0) == 0);
    CHECK(kTemplate.find("Reference Answer:\n{answer}") != std::string::npos);
    CHECK(kTemplate.find("Retrieved Chunk:\n{chunk_text}") != std::string::npos);
    CHECK(kTemplate.find("0 = Not relevant") != std::string::npos);
    CHECK(kTemplate.find("1 = Partially relevant") != std::string::npos);
    CHECK(kTemplate.find("2 = Fully relevant") != std::string::npos);
    CHECK(kTemplate.find("Respond with JSON only:") != std::string::npos);
    CHECK(kTemplate.back() == '}');  // no trailing newline
}

TEST_CASE("render substitutes both slots and nothing else") {
    const std::string prompt = render_prompt("ANSWER_BODY", "CHUNK_BODY");
    CHECK(prompt.find("Reference Answer:\nANSWER_BODY") != std::string::npos);
    CHECK(prompt.find("Retrieved Chunk:\nCHUNK_BODY") != std::string::npos);
    CHECK(prompt.find("{answer}") == std::string::npos);
    CHECK(prompt.find("{chunk_text}") == std::string::npos);
    // everything outside the two slots is byte-identical to the template
    CHECK(prompt.size() == kTemplate.size() - 8 - 12 + 11 + 10);
}

TEST_CASE("substituted text cannot hijack the other slot") {
    const std::string prompt = render_prompt("literal {chunk_text} inside", "chunk {answer} here");
    CHECK(prompt.find("Reference Answer:\nliteral {chunk_text} inside") != std::string::npos);
    CHECK(prompt.find("Retrieved Chunk:\nchunk {answer} here") != std::string::npos);
}

TEST_CASE("llm judge parses a clean verdict") {
    auto chat = std::make_shared<ScriptedChat>(std::vector<std::string>{
        R"({"score": 2, "reason": "covers everything"})"});
    LlmJudge judge(chat);
    const auto j = judge.judge("the answer", "the chunk");
    CHECK(j.gain == 2);
    CHECK(j.reason == "covers everything");
    CHECK(j.judge_model == "scripted-chat");
    CHECK_FALSE(j.degraded);
    CHECK(chat->calls() == 1);
}

TEST_CASE("llm judge recovers json wrapped in prose") {
    auto chat = std::make_shared<ScriptedChat>(std::vector<std::string>{
        "Sure, here's my verdict:\n```json\n{\"score\": 1, \"reason\": \"partial\"}\n```"});
    LlmJudge judge(chat);
    const auto j = judge.judge("a", "c");
    CHECK(j.gain == 1);
    CHECK_FALSE(j.degraded);
}

TEST_CASE("llm judge retries malformed replies then succeeds") {
    auto chat = std::make_shared<ScriptedChat>(std::vector<std::string>{
        "no json at all",
        R"({"score": 7, "reason": "out of range"})",
        R"({"score": 0, "reason": "third time"})"});
    LlmJudge judge(chat);
    const auto j = judge.judge("a", "c");
    CHECK(j.gain == 0);
    CHECK(j.reason == "third time");
    CHECK_FALSE(j.degraded);
    CHECK(chat->calls() == 3);
}

TEST_CASE("llm judge degrades to zero after exhausting retries") {
    auto chat = std::make_shared<ScriptedChat>(std::vector<std::string>{}, "still not json");
    LlmJudge judge(chat);
    const auto j = judge.judge("a", "c");
    CHECK(j.gain == 0);
    CHECK(j.degraded);
    CHECK(chat->calls() == 3);
}

TEST_CASE("llm judge rejects missing reason or non-integer score") {
    auto chat = std::make_shared<ScriptedChat>(std::vector<std::string>{
        R"({"score": 2})", R"({"score": 1.5, "reason": "x"})", R"({"score": 2, "reason": "ok"})"});
    LlmJudge judge(chat);
    const auto j = judge.judge("a", "c");
    CHECK(j.gain == 2);
    CHECK(j.reason == "ok");
}

TEST_CASE("mock judge grades by answer-token coverage") {
    MockJudge judge;
    // ten distinct qualifying tokens
    const std::string answer = "alpha bravo carbon delta ember falcon granite harbor indigo juniper";
    const auto full = judge.judge(answer,
                                  "alpha bravo carbon delta ember falcon granite text text");
    CHECK(full.gain == 2);  // 7/10 coverage
    const auto partial = judge.judge(answer, "alpha bravo carbon plus other words");
    CHECK(partial.gain == 1);  // 3/10
    const auto none = judge.judge(answer, "completely unrelated sentence");
    CHECK(none.gain == 0);
    CHECK_FALSE(none.degraded);
}

TEST_CASE("mock judge ignores short tokens and handles empty answers") {
    MockJudge judge;
    // "of" and "to" are below the length floor; only "station" qualifies
    const auto j = judge.judge("of to station", "the station was of note to all");
    CHECK(j.gain == 2);  // 1/1 coverage

    const auto degraded = judge.judge("a an to", "anything");
    CHECK(degraded.gain == 0);
    CHECK(degraded.degraded);

    CHECK_THROWS_AS(MockJudge(0.3, 0.7), ContractError);  // thresholds inverted
}

TEST_CASE("mock judge is case-insensitive") {
    MockJudge judge;
    const auto j = judge.judge("Station Platform Junction",
                               "STATION platform junction and more");
    CHECK(j.gain == 2);
}

TEST_CASE("caching judge memoizes and persists") {
    const auto cache_file = std::filesystem::temp_directory_path() / "cb_judge_cache.jsonl";
    std::filesystem::remove(cache_file);

    auto chat = std::make_shared<ScriptedChat>(std::vector<std::string>{
        R"({"score": 2, "reason": "first"})", R"({"score": 1, "reason": "second"})"});
    {
        CachingJudge judge(std::make_shared<LlmJudge>(chat), cache_file);
        CHECK(judge.judge("ans", "chunk one").gain == 2);
        CHECK(judge.judge("ans", "chunk one").gain == 2);  // memory hit
        CHECK(chat->calls() == 1);
        CHECK(judge.judge("ans", "chunk two").gain == 1);
        CHECK(judge.entries() == 2);
    }
    // a fresh instance reloads from disk; the scripted provider is exhausted,
    // so any inner call would throw
    CachingJudge reloaded(std::make_shared<LlmJudge>(chat), cache_file);
    CHECK(reloaded.entries() == 2);
    const auto j = reloaded.judge("ans", "chunk one");
    CHECK(j.gain == 2);
    CHECK(j.reason == "first");
    CHECK(chat->calls() == 2);
    std::filesystem::remove(cache_file);
}

TEST_CASE("caching judge keys on answer and chunk separately") {
    auto inner = std::make_shared<MockJudge>();
    CachingJudge judge(inner);
    // swapped roles must produce distinct cache entries and distinct grades
    const auto a = judge.judge("station platform", "station");
    const auto b = judge.judge("station", "station platform");
    CHECK(judge.entries() == 2);
    CHECK(a.gain == 1);  // half the answer tokens covered
    CHECK(b.gain == 2);  // full coverage
}

TEST_CASE("judge batch returns input order and honors workers") {
    MockJudge inner;
    std::vector<JudgeTask> tasks;
    const std::string answer = "station platform junction terminal";
    tasks.push_back({"q1", "c1", answer, "station platform junction terminal"});
    tasks.push_back({"q1", "c2", answer, "station platform briefly mentioned"});
    tasks.push_back({"q2", "c3", answer, "nothing relevant at all"});

    for (std::size_t workers : {std::size_t{1}, std::size_t{4}}) {
        const auto out = judge_batch(inner, tasks, workers);
        REQUIRE(out.size() == 3);
        CHECK(out[0].query_id == "q1");
        CHECK(out[0].chunk_id == "c1");
        CHECK(out[0].gain == 2);
        CHECK(out[1].gain == 1);
        CHECK(out[2].query_id == "q2");
        CHECK(out[2].gain == 0);
    }
}

TEST_CASE("judge batch surfaces the first failure") {
    class ThrowingJudge : public Judge {
    public:
        const std::string& model_id() const override { return id_; }
        Judgment judge(const std::string&, const std::string& chunk) override {
            if (chunk == "boom") throw ProviderError("backend down");
            return {"", "", 1, "ok", id_, false};
        }

    private:
        std::string id_ = "throwing";
    };
    ThrowingJudge inner;
    std::vector<JudgeTask> tasks = {{"q", "c1", "a", "fine"},
                                    {"q", "c2", "a", "boom"},
                                    {"q", "c3", "a", "fine"}};
    CHECK_THROWS_AS(judge_batch(inner, tasks, 2), ProviderError);
    CHECK(judge_batch(inner, {}, 4).empty());
}
