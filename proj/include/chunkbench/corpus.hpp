#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace chunkbench {

struct Document {
    std::string id;
    std::string domain;
    std::string text;  // nfc-normalized on load
};

struct Query {
    std::string id;
    std::string domain;
    std::string text;
    std::string golden_answer;  // judge-only; retrieval code receives QueryView
};

// projection handed to chunking/indexing/retrieval so those stages cannot see
// the golden answer even by accident
struct QueryView {
    const std::string& id;
    const std::string& domain;
    const std::string& text;
};

inline QueryView retrieval_view(const Query& q) { return {q.id, q.domain, q.text}; }

struct LoadOptions {
    // maps alternate field names: context->text, input->query, answers[0]->answer
    bool ultradomain_adapter = false;
};

std::vector<Document> load_documents(const std::filesystem::path& path, const LoadOptions& opts = {});
std::vector<Query> load_queries(const std::filesystem::path& path, const LoadOptions& opts = {});

std::string serialize_document(const Document& d);
std::string serialize_query(const Query& q);

// distinct domains in first-appearance order
std::vector<std::string> list_domains(const std::vector<Document>& docs);

// every query's domain must match some document's domain
void validate_query_domains(const std::vector<Query>& queries, const std::vector<Document>& docs);

}  // namespace chunkbench
