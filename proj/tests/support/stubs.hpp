#pragma once

// Deterministic provider doubles for tests.

#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "taxoforge/datasets.hpp"
#include "taxoforge/embedding.hpp"
#include "taxoforge/providers.hpp"

namespace fixtures {

// Fixed text -> vector table; unknown texts map to the zero vector.
class StubEmbedder : public taxoforge::EmbeddingProvider {
public:
    explicit StubEmbedder(std::map<std::string, std::vector<double>> table, size_t dim)
        : table_(std::move(table)), dim_(dim) {}

    size_t dimension() const override { return dim_; }

    std::vector<double> embed(const std::string& text) override {
        auto it = table_.find(text);
        if (it == table_.end()) return std::vector<double>(dim_, 0.0);
        return it->second;
    }

    std::map<std::string, std::vector<double>> table_;
    size_t dim_;
};

// Every distinct text gets its own one-hot vector.
class OneHotEmbedder : public taxoforge::EmbeddingProvider {
public:
    explicit OneHotEmbedder(size_t dim = 64) : dim_(dim) {}

    size_t dimension() const override { return dim_; }

    std::vector<double> embed(const std::string& text) override {
        auto [it, inserted] = index_.emplace(text, index_.size());
        if (it->second >= dim_) throw taxoforge::Error("one-hot stub exhausted");
        std::vector<double> v(dim_, 0.0);
        v[it->second] = 1.0;
        return v;
    }

    std::map<std::string, size_t> index_;
    size_t dim_;
};

// Answers each prompt via a handler function and records every prompt.
class ScriptedLlm : public taxoforge::LlmBackend {
public:
    using Handler = std::function<std::string(const std::string&)>;

    explicit ScriptedLlm(Handler handler) : handler_(std::move(handler)) {}

    std::string complete(const std::string& prompt) override {
        std::lock_guard<std::mutex> lock(mu_);
        prompts.push_back(prompt);
        return handler_(prompt);
    }

    std::vector<std::string> prompts;

private:
    Handler handler_;
    std::mutex mu_;
};

class ScriptedNli : public taxoforge::NliBackend {
public:
    using Handler = std::function<taxoforge::NliScores(const std::string&, const std::string&)>;

    explicit ScriptedNli(Handler handler) : handler_(std::move(handler)) {}

    taxoforge::NliScores classify(const std::string& premise,
                                  const std::string& hypothesis) override {
        std::lock_guard<std::mutex> lock(mu_);
        ++calls;
        return handler_(premise, hypothesis);
    }

    size_t calls = 0;

private:
    Handler handler_;
    std::mutex mu_;
};

// Extracts the value of the last `Field: value` line in a prompt.
inline std::string last_prompt_field(const std::string& prompt, const std::string& field) {
    std::string marker = "\n" + field + ": ";
    size_t pos = prompt.rfind(marker);
    if (pos == std::string::npos) return "";
    size_t start = pos + marker.size();
    size_t end = prompt.find('\n', start);
    return prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

// Answers prompts from a hidden gold taxonomy: gold parents for parent
// prompts, gold children restricted to the offered candidates for child
// prompts, canned text for description prompts.
class OracleLlm : public taxoforge::LlmBackend {
public:
    std::map<std::string, std::vector<std::string>> parents;   // query id -> parent labels
    std::map<std::string, std::vector<std::string>> children;  // query id -> child labels

    // Oracle over a full taxonomy (generation experiments).
    static OracleLlm from_taxonomy(const taxoforge::Taxonomy& tax) {
        OracleLlm oracle;
        for (const auto& id : tax.concept_order()) {
            std::vector<std::string> ps;
            for (const auto& p : tax.parents(id)) ps.push_back(tax.concept_by_id(p).label);
            if (ps.empty()) ps.push_back(taxoforge::kPseudoRootLabel);
            oracle.parents[id] = ps;
            std::vector<std::string> cs;
            for (const auto& c : tax.children(id)) cs.push_back(tax.concept_by_id(c).label);
            oracle.children[id] = cs;
        }
        return oracle;
    }

    // Oracle over held-out gold placements (completion experiments).
    static OracleLlm from_gold(const std::vector<taxoforge::QueryGold>& queries) {
        OracleLlm oracle;
        for (const auto& q : queries) {
            std::set<std::string> ps, cs;
            for (const auto& g : q.gold) {
                ps.insert(g.parent == "pseudo-root" ? taxoforge::kPseudoRootLabel : g.parent);
                if (g.child != "pseudo-leaf") cs.insert(g.child);
            }
            oracle.parents[q.query.id] = {ps.begin(), ps.end()};
            oracle.children[q.query.id] = {cs.begin(), cs.end()};
        }
        return oracle;
    }

    std::string complete(const std::string& prompt) override {
        using taxoforge::normalize_label;
        if (prompt.rfind("Describe the concept \"", 0) == 0) {
            size_t start = std::string("Describe the concept \"").size();
            std::string label = prompt.substr(start, prompt.find('"', start) - start);
            return label + " is a concept from the fixture taxonomy.";
        }
        if (prompt.rfind("Write a paragraph", 0) == 0)
            return "A fixture taxonomy of nested groups with specific items as leaves.";

        std::string child_field = last_prompt_field(prompt, "Child");
        if (!child_field.empty()) {
            std::string q = normalize_label(child_field);
            auto it = parents.find(q);
            std::string answer = it == parents.end() || it->second.empty()
                                     ? std::string("None")
                                     : taxoforge::join(it->second, ", ");
            return "find the parents of " + child_field + ".\n\nInterpretation: " + child_field +
                   " in relation to the context.\n\nParents: " + answer;
        }

        std::string parent_field = last_prompt_field(prompt, "Parent");
        std::string q = normalize_label(parent_field);
        std::vector<std::string> offered =
            taxoforge::split_list(last_prompt_field(prompt, "Candidates"));
        std::set<std::string> gold_children;
        auto it = children.find(q);
        if (it != children.end())
            for (const auto& c : it->second) gold_children.insert(normalize_label(c));
        std::vector<std::string> selected;
        for (const auto& cand : offered)
            if (gold_children.count(normalize_label(cand))) selected.push_back(cand);
        bool leaf = gold_children.empty();
        return "select the children of " + parent_field + ".\n\nLeaf: " +
               (leaf ? "Yes" : "No") + "\n\nChildren: " + taxoforge::join(selected, ", ");
    }
};

}  // namespace fixtures
