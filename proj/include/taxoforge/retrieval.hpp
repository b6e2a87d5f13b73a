#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "taxoforge/embedding.hpp"
#include "taxoforge/taxonomy.hpp"

namespace taxoforge {

// Rendered edge lines that go into a prompt's Context block.
struct EdgeContext {
    std::vector<std::string> lines;
    size_t k = 0;
};

// `parent, child`, or `parent (Non-Leaf), child (Leaf|Non-Leaf)` for the
// child-selection prompts. Pseudo edges are never rendered.
inline std::string encode_edge(const Taxonomy& tax,
                               const std::pair<std::string, std::string>& edge,
                               bool annotate_leaves) {
    const Concept& parent = tax.concept_by_id(edge.first);
    const Concept& child = tax.concept_by_id(edge.second);
    if (parent.is_pseudo || child.is_pseudo)
        throw Error("pseudo edges are never rendered");
    if (!annotate_leaves) return parent.label + ", " + child.label;
    auto tag = [&](const Concept& c) {
        return tax.is_leaf(c.id) ? std::string(" (Leaf)") : std::string(" (Non-Leaf)");
    };
    return parent.label + tag(parent) + ", " + child.label + tag(child);
}

struct ScoredEdge {
    std::pair<std::string, std::string> edge;
    double similarity;
};

// Query text for retrieval: the label, with the description appended when
// available (that is the string most similar to what the prompt shows).
inline std::string retrieval_text(const Concept& query) {
    if (query.description.empty()) return query.label;
    return query.label + " " + query.description;
}

// Edges ranked by cosine similarity between the query text and the plain
// rendered edge line, descending; ties go to the lexicographically smaller
// edge. Empty taxonomies yield an empty ranking (generation cold start).
inline std::vector<ScoredEdge> ranked_edges(const Taxonomy& tax, const Concept& query, size_t k,
                                            EmbeddingProvider& provider) {
    if (k == 0) throw Error("k must be >= 1");
    std::vector<ScoredEdge> scored;
    if (tax.edges().empty()) return scored;
    std::vector<double> qv = provider.embed(retrieval_text(query));
    scored.reserve(tax.edges().size());
    for (const auto& e : tax.edges()) {
        double sim = cosine_similarity(qv, provider.embed(encode_edge(tax, e, false)));
        scored.push_back({e, sim});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const ScoredEdge& a, const ScoredEdge& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.edge < b.edge;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

inline EdgeContext render_context(const Taxonomy& tax, const std::vector<ScoredEdge>& ranked,
                                  size_t k, bool annotate_leaves) {
    EdgeContext ctx;
    ctx.k = k;
    for (const auto& se : ranked) {
        std::string line = encode_edge(tax, se.edge, annotate_leaves);
        if (std::find(ctx.lines.begin(), ctx.lines.end(), line) == ctx.lines.end())
            ctx.lines.push_back(std::move(line));
    }
    return ctx;
}

inline EdgeContext top_k_edges(const Taxonomy& tax, const Concept& query, size_t k,
                               EmbeddingProvider& provider, bool annotate_leaves = false) {
    return render_context(tax, ranked_edges(tax, query, k, provider), k, annotate_leaves);
}

}  // namespace taxoforge
