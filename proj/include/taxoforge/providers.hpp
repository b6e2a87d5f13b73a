#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <unordered_map>

#include "taxoforge/http.hpp"
#include "taxoforge/prompts.hpp"
#include "taxoforge/util.hpp"

namespace taxoforge {

// A call either returns text or throws a typed transport error; there is
// no partial state. Implementations are shared, reentrant clients.
class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

enum class NliClass { Entailment, Neutral, Contradiction };

struct NliScores {
    double entailment = 0;
    double neutral = 0;
    double contradiction = 0;

    // Ties resolve in favor of the earlier class (entailment first).
    NliClass argmax() const {
        if (entailment >= neutral && entailment >= contradiction) return NliClass::Entailment;
        if (neutral >= contradiction) return NliClass::Neutral;
        return NliClass::Contradiction;
    }

    void validate() const {
        double sum = entailment + neutral + contradiction;
        if (std::abs(sum - 1.0) > 1e-6)
            throw BackendError("NLI probabilities sum to " + std::to_string(sum) + ", not 1");
    }
};

class NliBackend {
public:
    virtual ~NliBackend() = default;
    virtual NliScores classify(const std::string& premise, const std::string& hypothesis) = 0;
};

struct LlmConfig {
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string token_env;  // tokens come from the environment only
    double temperature = 0.0;
    int max_tokens = 1024;
    int retries = 3;
    int max_inflight = 4;
};

// Chat-completion-compatible HTTP endpoint.
class HttpLlm : public LlmBackend {
public:
    explicit HttpLlm(LlmConfig config)
        : config_(std::move(config)), inflight_(std::max(1, config_.max_inflight)) {}

    std::string complete(const std::string& prompt) override {
        nlohmann::json body{
            {"model", config_.model},
            {"messages", {{{"role", "user"}, {"content", prompt}}}},
            {"temperature", config_.temperature},
            {"max_tokens", config_.max_tokens},
        };
        httplib::Headers headers;
        if (!config_.token_env.empty()) {
            if (const char* token = std::getenv(config_.token_env.c_str()))
                headers.emplace("Authorization", std::string("Bearer ") + token);
        }
        inflight_.acquire();
        struct Release {
            std::counting_semaphore<>& s;
            ~Release() { s.release(); }
        } release{inflight_};
        nlohmann::json resp =
            http_post_json(config_.base_url, config_.path, body, headers, config_.retries);
        try {
            return resp.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("unexpected chat completion shape: ") + e.what());
        }
    }

private:
    LlmConfig config_;
    std::counting_semaphore<> inflight_;
};

// Deterministic test/replay backend: a directory of <fnv1a(prompt)>.txt
// response files.
class ReplayLlm : public LlmBackend {
public:
    explicit ReplayLlm(std::string dir) : dir_(std::move(dir)) {}

    std::string complete(const std::string& prompt) override {
        std::string hash = fnv1a_hex(prompt);
        std::filesystem::path file = std::filesystem::path(dir_) / (hash + ".txt");
        std::ifstream in(file, std::ios::binary);
        if (!in)
            throw BackendError("replay cache miss for request " + hash + " (" + file.string() +
                               ")");
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

private:
    std::string dir_;
};

// Wraps a live backend and records request/response pairs in the replay
// layout, prompts alongside for inspection.
class RecordingLlm : public LlmBackend {
public:
    RecordingLlm(LlmBackend& inner, std::string dir) : inner_(inner), dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::string complete(const std::string& prompt) override {
        std::string response = inner_.complete(prompt);
        std::string hash = fnv1a_hex(prompt);
        std::lock_guard<std::mutex> lock(mu_);
        write_file(hash + ".txt", response);
        write_file(hash + ".prompt.txt", prompt);
        return response;
    }

private:
    void write_file(const std::string& name, const std::string& content) {
        std::ofstream out(std::filesystem::path(dir_) / name, std::ios::binary);
        out << content;
    }

    LlmBackend& inner_;
    std::string dir_;
    std::mutex mu_;
};

struct NliConfig {
    std::string base_url;
    std::string path = "/nli";
    std::string token_env;
    int retries = 3;
};

// POST {premise, hypothesis} -> {entailment, neutral, contradiction}.
class HttpNli : public NliBackend {
public:
    explicit HttpNli(NliConfig config) : config_(std::move(config)) {}

    NliScores classify(const std::string& premise, const std::string& hypothesis) override {
        httplib::Headers headers;
        if (!config_.token_env.empty()) {
            if (const char* token = std::getenv(config_.token_env.c_str()))
                headers.emplace("Authorization", std::string("Bearer ") + token);
        }
        nlohmann::json resp =
            http_post_json(config_.base_url, config_.path,
                           {{"premise", premise}, {"hypothesis", hypothesis}}, headers,
                           config_.retries);
        NliScores scores;
        try {
            scores.entailment = resp.at("entailment").get<double>();
            scores.neutral = resp.at("neutral").get<double>();
            scores.contradiction = resp.at("contradiction").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("unexpected NLI response shape: ") + e.what());
        }
        scores.validate();
        return scores;
    }

private:
    NliConfig config_;
};

// Fixed probability triple, for stubs and offline runs.
class ConstNli : public NliBackend {
public:
    ConstNli(double entailment, double neutral, double contradiction)
        : scores_{entailment, neutral, contradiction} {
        scores_.validate();
    }

    NliScores classify(const std::string&, const std::string&) override { return scores_; }

private:
    NliScores scores_;
};

// "lemma(x)" is realized as the normalized lowercase label.
inline std::string parent_hypothesis(const Concept& query, const std::string& parent_label) {
    return normalize_label(query.label) + " is a " + normalize_label(parent_label);
}

inline std::string child_hypothesis(const Concept& query, const std::string& child_label) {
    return normalize_label(child_label) + " is a " + normalize_label(query.label);
}

inline std::string premise_for(const Concept& c) {
    if (!c.description.empty()) return c.description;
    log_info("no description for '" + c.label + "', falling back to the label as premise");
    return c.label + ".";
}

// Parents pass on the mere absence of contradiction; the pseudo-root skips
// verification entirely.
inline bool verify_parent(NliBackend& nli, const Concept& query, const std::string& parent_label) {
    if (is_pseudo_root_marker(parent_label)) return true;
    NliScores s = nli.classify(premise_for(query), parent_hypothesis(query, parent_label));
    return s.argmax() != NliClass::Contradiction;
}

// Children must be entailed; the pseudo-leaf skips verification.
inline bool verify_child(NliBackend& nli, const Concept& query, const Concept& child) {
    if (child.is_pseudo || is_pseudo_leaf_marker(child.label)) return true;
    NliScores s = nli.classify(premise_for(child), child_hypothesis(query, child.label));
    return s.argmax() == NliClass::Entailment;
}

// Generates and caches concept descriptions.
class DescriptionService {
public:
    explicit DescriptionService(LlmBackend& llm) : llm_(llm) {}

    std::string describe(const std::string& label) {
        std::string trimmed = trim(label);
        if (trimmed.empty()) throw Error("cannot describe an empty label");
        std::string key = normalize_label(trimmed);
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        std::string text = trim(llm_.complete(render_describe_prompt(trimmed)));
        const std::string marker = "Description:";
        if (text.rfind(marker, 0) == 0) text = trim(text.substr(marker.size()));
        if (normalize_label(text.substr(0, trimmed.size())) != key)
            text = trimmed + " is " + text;
        std::lock_guard<std::mutex> lock(mu_);
        cache_.emplace(std::move(key), text);
        return text;
    }

    size_t cache_size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return cache_.size();
    }

private:
    LlmBackend& llm_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::string> cache_;
};

}  // namespace taxoforge
