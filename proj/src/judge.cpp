#include "chunkbench/judge.hpp"

#include <atomic>
#include <thread>
#include <unordered_set>

#include <spdlog/spdlog.h>
#include "json.hpp"

#include "chunkbench/errors.hpp"
#include "chunkbench/segmentation.hpp"
#include "chunkbench/text.hpp"
#include "chunkbench/util.hpp"

namespace chunkbench {

const char* const kJudgePromptTemplate =
    R"(You are a strict information retrieval judge.

Reference Answer:
{answer}

Retrieved Chunk:
{chunk_text}

Assign a relevance score:
0 = Not relevant
1 = Partially relevant
2 = Fully relevant

Respond with JSON only:
{
  "score": 0 | 1 | 2,
  "reason": "short explanation"
})";

std::string render_prompt(const std::string& answer, const std::string& chunk_text) {
    const std::string tmpl = kJudgePromptTemplate;
    const auto a_pos = tmpl.find("{answer}");
    const auto c_pos = tmpl.find("{chunk_text}");
    // splice back to front so substituted text can never shift the other slot
    std::string out = tmpl;
    out.replace(c_pos, 12, chunk_text);
    out.replace(a_pos, 8, answer);
    return out;
}

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (static_cast<unsigned char>(s[b]) <= ' ')) ++b;
    while (e > b && (static_cast<unsigned char>(s[e - 1]) <= ' ')) --e;
    return s.substr(b, e - b);
}

// strict parse first, then the outermost brace span for replies that wrap the
// JSON in prose
bool parse_judge_reply(const std::string& reply, int& gain, std::string& reason) {
    auto try_parse = [&](const std::string& text) {
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded() || !j.is_object()) return false;
        if (!j.contains("score") || !j["score"].is_number_integer()) return false;
        if (!j.contains("reason") || !j["reason"].is_string()) return false;
        const auto score = j["score"].get<long long>();
        if (score < 0 || score > 2) return false;
        gain = static_cast<int>(score);
        reason = j["reason"].get<std::string>();
        return true;
    };
    const std::string trimmed = trim_copy(reply);
    if (try_parse(trimmed)) return true;
    const auto open = trimmed.find('{');
    const auto close = trimmed.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close <= open) return false;
    return try_parse(trimmed.substr(open, close - open + 1));
}

std::unordered_set<std::string> coverage_tokens(const std::string& text) {
    std::unordered_set<std::string> out;
    for (const auto& tok : tokenize(text).tokens) {
        if (tok.char_span.length() < 3) continue;
        out.insert(lowercase_utf8(tok.text));
    }
    return out;
}

}  // namespace

LlmJudge::LlmJudge(std::shared_ptr<ChatProvider> provider, int max_attempts)
    : provider_(std::move(provider)), max_attempts_(max_attempts) {
    if (max_attempts_ < 1) throw ContractError("judge needs at least one attempt");
}

Judgment LlmJudge::judge(const std::string& answer, const std::string& chunk_text) {
    const std::string prompt = render_prompt(answer, chunk_text);
    Judgment j;
    j.judge_model = provider_->model_id();
    for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
        const std::string reply = provider_->complete(prompt);
        if (parse_judge_reply(reply, j.gain, j.reason)) return j;
        spdlog::warn("judge reply unparseable (attempt {}/{}): {}", attempt, max_attempts_,
                     reply.substr(0, 200));
    }
    j.gain = 0;
    j.reason = "unparseable judge response";
    j.degraded = true;
    return j;
}

MockJudge::MockJudge(double full_threshold, double partial_threshold)
    : full_threshold_(full_threshold), partial_threshold_(partial_threshold) {
    if (partial_threshold_ > full_threshold_)
        throw ContractError("partial threshold above full threshold");
}

Judgment MockJudge::judge(const std::string& answer, const std::string& chunk_text) {
    Judgment j;
    j.judge_model = model_id_;
    const auto answer_tokens = coverage_tokens(answer);
    if (answer_tokens.empty()) {
        j.gain = 0;
        j.reason = "answer has no scoreable tokens";
        j.degraded = true;
        return j;
    }
    const auto chunk_tokens = coverage_tokens(chunk_text);
    std::size_t hit = 0;
    for (const auto& t : answer_tokens) hit += chunk_tokens.count(t);
    const double coverage = static_cast<double>(hit) / static_cast<double>(answer_tokens.size());
    j.gain = coverage >= full_threshold_ ? 2 : coverage >= partial_threshold_ ? 1 : 0;
    j.reason = "coverage " + format_real(coverage);
    return j;
}

CachingJudge::CachingJudge(std::shared_ptr<Judge> inner, std::filesystem::path cache_file)
    : inner_(std::move(inner)), cache_file_(std::move(cache_file)) {
    if (cache_file_.empty()) return;
    ensure_dir(cache_file_.parent_path());
    std::error_code ec;
    if (!std::filesystem::exists(cache_file_, ec)) return;
    for (const auto& line : read_lines(cache_file_)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("key")) {
            spdlog::warn("skipping malformed judgment cache line");
            continue;
        }
        memory_[j["key"].get<std::string>()] = {j["gain"].get<int>(),
                                                j["reason"].get<std::string>(),
                                                j["degraded"].get<bool>()};
    }
}

Judgment CachingJudge::from_entry(const Entry& e) const {
    Judgment j;
    j.gain = e.gain;
    j.reason = e.reason;
    j.judge_model = inner_->model_id();
    j.degraded = e.degraded;
    return j;
}

std::size_t CachingJudge::entries() const {
    std::lock_guard lock(mu_);
    return memory_.size();
}

Judgment CachingJudge::judge(const std::string& answer, const std::string& chunk_text) {
    const std::string key =
        content_key(inner_->model_id(), answer + std::string(1, '\x1f') + chunk_text);
    std::shared_future<Entry> wait_on;
    std::promise<Entry> claim;
    bool claimed = false;
    {
        std::lock_guard lock(mu_);
        if (auto it = memory_.find(key); it != memory_.end()) return from_entry(it->second);
        if (auto it = in_flight_.find(key); it != in_flight_.end()) {
            wait_on = it->second;
        } else {
            claimed = true;
            wait_on = claim.get_future().share();
            in_flight_[key] = wait_on;
        }
    }
    if (!claimed) return from_entry(wait_on.get());

    try {
        Judgment j = inner_->judge(answer, chunk_text);
        Entry e{j.gain, j.reason, j.degraded};
        {
            std::lock_guard lock(mu_);
            memory_[key] = e;
            in_flight_.erase(key);
        }
        if (!cache_file_.empty()) {
            nlohmann::json row = {{"key", key},
                                  {"gain", e.gain},
                                  {"reason", e.reason},
                                  {"judge_model", inner_->model_id()},
                                  {"degraded", e.degraded}};
            append_line(cache_file_, row.dump());
        }
        claim.set_value(std::move(e));
        return j;
    } catch (...) {
        {
            std::lock_guard lock(mu_);
            in_flight_.erase(key);
        }
        claim.set_exception(std::current_exception());
        throw;
    }
}

std::vector<Judgment> judge_batch(Judge& judge, const std::vector<JudgeTask>& tasks,
                                  std::size_t workers) {
    std::vector<Judgment> out(tasks.size());
    if (tasks.empty()) return out;
    workers = std::max<std::size_t>(1, std::min(workers, tasks.size()));

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            {
                std::lock_guard lock(err_mu);
                if (first_error) return;
            }
            try {
                Judgment j = judge.judge(tasks[i].answer, tasks[i].chunk_text);
                j.query_id = tasks[i].query_id;
                j.chunk_id = tasks[i].chunk_id;
                out[i] = std::move(j);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

}  // namespace chunkbench
