#include "chunkbench/corpus.hpp"

#include <fstream>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "json.hpp"

#include "chunkbench/errors.hpp"
#include "chunkbench/text.hpp"
#include "chunkbench/util.hpp"

namespace chunkbench {

namespace {

using nlohmann::json;

json parse_line(const std::string& line, std::size_t lineno) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed json", lineno);
    if (!j.is_object()) throw ParseError("expected a json object", lineno);
    return j;
}

std::string need_string(const json& j, const char* key, std::size_t lineno) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw ValidationError("missing or non-string field \"" + std::string(key) + "\" on line " +
                              std::to_string(lineno));
    return it->get<std::string>();
}

std::string need_nonempty(const json& j, const char* key, std::size_t lineno) {
    std::string v = need_string(j, key, lineno);
    if (v.empty())
        throw ValidationError("empty field \"" + std::string(key) + "\" on line " +
                              std::to_string(lineno));
    return v;
}

}  // namespace

std::vector<Document> load_documents(const std::filesystem::path& path, const LoadOptions& opts) {
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::size_t lineno = 0;
    for (const std::string& line : read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        json j = parse_line(line, lineno);
        Document d;
        d.id = need_nonempty(j, "id", lineno);
        d.domain = need_nonempty(j, "domain", lineno);
        if (opts.ultradomain_adapter && !j.contains("text") && j.contains("context"))
            d.text = need_nonempty(j, "context", lineno);
        else
            d.text = need_nonempty(j, "text", lineno);
        if (!seen.insert(d.id).second)
            throw ValidationError("duplicate document id \"" + d.id + "\" on line " +
                                  std::to_string(lineno));
        d.text = nfc_normalize(d.text);
        docs.push_back(std::move(d));
    }
    return docs;
}

std::vector<Query> load_queries(const std::filesystem::path& path, const LoadOptions& opts) {
    std::vector<Query> queries;
    std::unordered_set<std::string> seen;
    std::size_t lineno = 0;
    for (const std::string& line : read_lines(path)) {
        ++lineno;
        if (line.empty()) continue;
        json j = parse_line(line, lineno);
        Query q;
        q.id = need_nonempty(j, "id", lineno);
        q.domain = need_nonempty(j, "domain", lineno);
        if (opts.ultradomain_adapter && !j.contains("query") && j.contains("input"))
            q.text = need_nonempty(j, "input", lineno);
        else
            q.text = need_nonempty(j, "query", lineno);
        if (opts.ultradomain_adapter && !j.contains("answer") && j.contains("answers")) {
            const auto& a = j["answers"];
            if (!a.is_array() || a.empty() || !a[0].is_string() || a[0].get<std::string>().empty())
                throw ValidationError("missing or empty field \"answers\" on line " +
                                      std::to_string(lineno));
            if (a.size() > 1)
                spdlog::warn("query {} has {} answers; taking the first", q.id, a.size());
            q.golden_answer = a[0].get<std::string>();
        } else {
            q.golden_answer = need_nonempty(j, "answer", lineno);
        }
        if (!seen.insert(q.id).second)
            throw ValidationError("duplicate query id \"" + q.id + "\" on line " +
                                  std::to_string(lineno));
        q.text = nfc_normalize(q.text);
        q.golden_answer = nfc_normalize(q.golden_answer);
        queries.push_back(std::move(q));
    }
    return queries;
}

std::string serialize_document(const Document& d) {
    json j = {{"id", d.id}, {"domain", d.domain}, {"text", d.text}};
    return j.dump();
}

std::string serialize_query(const Query& q) {
    json j = {{"id", q.id}, {"domain", q.domain}, {"query", q.text}, {"answer", q.golden_answer}};
    return j.dump();
}

std::vector<std::string> list_domains(const std::vector<Document>& docs) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& d : docs)
        if (seen.insert(d.domain).second) out.push_back(d.domain);
    return out;
}

void validate_query_domains(const std::vector<Query>& queries, const std::vector<Document>& docs) {
    std::unordered_set<std::string> domains;
    for (const auto& d : docs) domains.insert(d.domain);
    for (const auto& q : queries)
        if (!domains.count(q.domain))
            throw ValidationError("query \"" + q.id + "\" references unknown domain \"" + q.domain +
                                  "\"");
}

}  // namespace chunkbench
