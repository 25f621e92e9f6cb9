#include "http_util.hpp"

#include <chrono>
#include <thread>

#include "httplib.h"

#include "chunkbench/errors.hpp"

namespace chunkbench::detail {

void split_base_url(const std::string& base_url, std::string& origin, std::string& prefix) {
    auto scheme_end = base_url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = base_url.find('/', host_start);
    if (path_start == std::string::npos) {
        origin = base_url;
        prefix.clear();
    } else {
        origin = base_url.substr(0, path_start);
        prefix = base_url.substr(path_start);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    }
}

nlohmann::json http_post_json(const std::string& base_url, const std::string& path,
                              const std::string& api_key, const nlohmann::json& body,
                              int batch_index) {
    std::string origin;
    std::string prefix;
    split_base_url(base_url, origin, prefix);
    if (origin.empty()) throw ProviderError("empty endpoint base url", batch_index);

    const std::string payload = body.dump();
    std::string last_error = "unknown";
    constexpr int kAttempts = 3;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(250 << (attempt - 1)));
        httplib::Client cli(origin);
        cli.set_connection_timeout(10, 0);
        cli.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
        auto res = cli.Post(prefix + path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded()) {
            last_error = "unparseable response body";
            continue;
        }
        return j;
    }
    throw ProviderError("request to " + origin + prefix + path + " failed after " +
                            std::to_string(kAttempts) + " attempts: " + last_error,
                        batch_index);
}

}  // namespace chunkbench::detail
