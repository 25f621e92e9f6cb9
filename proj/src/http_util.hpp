#pragma once

// internal helper shared by the http embedding and chat providers

#include <string>

#include "json.hpp"

namespace chunkbench::detail {

// splits "scheme://host[:port]/prefix" into origin and path prefix
void split_base_url(const std::string& base_url, std::string& origin, std::string& prefix);

// POST body as json to {base_url}{path}; bearer auth when api_key non-empty.
// 3 attempts with exponential backoff from 250 ms; failures after that raise
// ProviderError carrying batch_index.
nlohmann::json http_post_json(const std::string& base_url, const std::string& path,
                              const std::string& api_key, const nlohmann::json& body,
                              int batch_index = -1);

}  // namespace chunkbench::detail
