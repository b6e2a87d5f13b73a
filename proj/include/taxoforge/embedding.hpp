#pragma once

#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "taxoforge/http.hpp"
#include "taxoforge/util.hpp"

namespace taxoforge {

// Maps text to a fixed-dimension vector. Implementations must be safe to
// call from concurrent completion workers, and deterministic: the same
// input always yields the same vector.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual size_t dimension() const = 0;
    virtual std::vector<double> embed(const std::string& text) = 0;
};

// Zero vectors have similarity 0 by convention.
inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Word-vector file: optional `<count> <dim>` header, then
// `token v1 v2 ... vdim` per line, space separated. Multi-word texts are
// embedded as the mean of their in-vocabulary token vectors;
// out-of-vocabulary texts map to the zero vector.
class WordVectorProvider : public EmbeddingProvider {
public:
    explicit WordVectorProvider(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open word-vector file: " + path);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            if (first) {
                first = false;
                // header is two integers and nothing else
                long long count, dim;
                char extra;
                std::istringstream probe(line);
                if ((probe >> count >> dim) && !(probe >> extra) && count > 0 && dim > 0) {
                    dimension_ = static_cast<size_t>(dim);
                    continue;
                }
            }
            std::string token;
            ss >> token;
            std::vector<double> vec;
            double v;
            while (ss >> v) vec.push_back(v);
            if (vec.empty()) continue;
            if (dimension_ == 0) dimension_ = vec.size();
            if (vec.size() != dimension_)
                throw Error(path + ": inconsistent vector length for token '" + token + "'");
            vectors_.emplace(normalize_label(token), std::move(vec));
        }
        if (vectors_.empty()) throw Error(path + ": no vectors loaded");
    }

    size_t dimension() const override { return dimension_; }

    std::vector<double> embed(const std::string& text) override {
        std::vector<double> acc(dimension_, 0.0);
        size_t hits = 0;
        for (const auto& token : tokenize(text)) {
            auto it = vectors_.find(token);
            if (it == vectors_.end()) continue;
            for (size_t i = 0; i < dimension_; ++i) acc[i] += it->second[i];
            ++hits;
        }
        if (hits > 1)
            for (auto& v : acc) v /= static_cast<double>(hits);
        return acc;
    }

private:
    static std::vector<std::string> tokenize(const std::string& text) {
        std::vector<std::string> tokens;
        std::string cur;
        for (char ch : text) {
            if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' ||
                ch == '\'') {
                cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
            } else if (!cur.empty()) {
                tokens.push_back(std::move(cur));
                cur.clear();
            }
        }
        if (!cur.empty()) tokens.push_back(std::move(cur));
        return tokens;
    }

    size_t dimension_ = 0;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Sentence-embedding endpoint: POST {"text": ...} -> [floats] or
// {"embedding": [floats]}.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(std::string base_url, std::string path = "/embed")
        : base_url_(std::move(base_url)), path_(std::move(path)) {}

    size_t dimension() const override { return dimension_; }

    std::vector<double> embed(const std::string& text) override {
        nlohmann::json resp = http_post_json(base_url_, path_, {{"text", text}});
        const nlohmann::json* arr = &resp;
        if (resp.is_object() && resp.contains("embedding")) arr = &resp["embedding"];
        if (!arr->is_array()) throw BackendError("embedding endpoint returned no array");
        std::vector<double> vec;
        vec.reserve(arr->size());
        for (const auto& v : *arr) vec.push_back(v.get<double>());
        {
            std::lock_guard<std::mutex> lock(mu_);
            if (dimension_ == 0) dimension_ = vec.size();
        }
        if (vec.size() != dimension_) throw BackendError("embedding dimension changed");
        return vec;
    }

private:
    std::string base_url_, path_;
    size_t dimension_ = 0;
    std::mutex mu_;
};

// Memoizes an inner provider, keyed by normalized text. Repeated retrieval
// over a growing taxonomy re-embeds the same edge lines constantly.
class CachingProvider : public EmbeddingProvider {
public:
    explicit CachingProvider(EmbeddingProvider& inner) : inner_(inner) {}

    size_t dimension() const override { return inner_.dimension(); }

    std::vector<double> embed(const std::string& text) override {
        std::string key = normalize_label(text);
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        std::vector<double> vec = inner_.embed(text);
        std::lock_guard<std::mutex> lock(mu_);
        cache_.emplace(std::move(key), vec);  // concurrent identical inserts are fine
        return vec;
    }

private:
    EmbeddingProvider& inner_;
    std::mutex mu_;
    std::unordered_map<std::string, std::vector<double>> cache_;
};

}  // namespace taxoforge
