#pragma once

#include <chrono>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "taxoforge/util.hpp"

namespace taxoforge {

// POSTs JSON to base_url + path, retrying transient failures. Throws
// BackendError once the retry budget is spent.
inline nlohmann::json http_post_json(const std::string& base_url, const std::string& path,
                                     const nlohmann::json& body,
                                     const httplib::Headers& headers = {},
                                     int retries = 3, int timeout_seconds = 120) {
    std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(100 * attempt));
        httplib::Client client(base_url);
        client.set_read_timeout(timeout_seconds, 0);
        client.set_connection_timeout(10, 0);
        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
            if (res->status >= 400 && res->status < 500 && res->status != 429) break;
            continue;
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("bad JSON in response: ") + e.what();
            break;
        }
    }
    throw BackendError("POST " + base_url + path + " failed: " + last_error);
}

}  // namespace taxoforge
