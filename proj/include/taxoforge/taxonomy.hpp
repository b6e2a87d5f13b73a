#pragma once

#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "taxoforge/util.hpp"

namespace taxoforge {

// Node of the hypernym-hyponym graph. Identity is the normalized label;
// the original casing is kept for prompts and reports.
struct Concept {
    std::string id;
    std::string label;
    std::string description;
    bool is_pseudo = false;
};

// (parent, query, child) triplet: the unit of prediction and insertion.
// Pseudo endpoints mean "no parent" / "no child".
struct Placement {
    std::string parent;
    std::string query;
    std::string child;

    bool operator==(const Placement& o) const {
        return parent == o.parent && query == o.query && child == o.child;
    }
    bool operator<(const Placement& o) const {
        if (parent != o.parent) return parent < o.parent;
        if (query != o.query) return query < o.query;
        return child < o.child;
    }
};

struct TaxonomyStats {
    size_t node_count = 0;
    size_t edge_count = 0;
    size_t depth = 0;
    size_t leaf_count = 0;
    double leaf_ratio = 0.0;
    double branching_factor = 0.0;
};

enum class ApplyResult { Applied, RejectedCycle };

inline constexpr const char* kPseudoRootLabel = "pseudo-root";
inline constexpr const char* kPseudoLeafLabel = "pseudo-leaf";

// Directed acyclic graph of concepts. Pseudo root/leaf are bookkeeping
// nodes: placements may reference them, but no pseudo edge is stored and
// none of the statistics count them. Mutation happens under a
// single-writer contract; all read paths are const.
class Taxonomy {
public:
    Taxonomy() {
        add_concept_internal(kPseudoRootLabel, "", true);
        add_concept_internal(kPseudoLeafLabel, "", true);
    }

    const std::string& pseudo_root() const { return pseudo_root_; }
    const std::string& pseudo_leaf() const { return pseudo_leaf_; }

    bool has_concept(const std::string& id) const { return concepts_.count(id) > 0; }

    const Concept& concept_by_id(const std::string& id) const {
        auto it = concepts_.find(id);
        if (it == concepts_.end()) throw Error("unknown concept id: " + id);
        return it->second;
    }

    const std::string& label_of(const std::string& id) const { return concept_by_id(id).label; }

    // Insertion-ordered non-pseudo concept ids.
    const std::vector<std::string>& concept_order() const { return order_; }

    // Adds (or revisits) a concept; returns its id. An existing concept
    // keeps its label; an empty description is filled in.
    std::string add_concept(const std::string& label, const std::string& description = "") {
        return add_concept_internal(label, description, false);
    }

    void set_description(const std::string& id, const std::string& description) {
        auto it = concepts_.find(id);
        if (it == concepts_.end()) throw Error("unknown concept id: " + id);
        it->second.description = description;
    }

    // Stored (non-pseudo) edges in insertion order.
    const std::vector<std::pair<std::string, std::string>>& edges() const { return edges_; }

    bool has_edge(const std::string& parent, const std::string& child) const {
        return edge_set_.count(edge_key(parent, child)) > 0;
    }

    const std::vector<std::string>& children(const std::string& id) const {
        static const std::vector<std::string> empty;
        auto it = children_.find(id);
        return it == children_.end() ? empty : it->second;
    }

    const std::vector<std::string>& parents(const std::string& id) const {
        static const std::vector<std::string> empty;
        auto it = parents_.find(id);
        return it == parents_.end() ? empty : it->second;
    }

    // Non-pseudo concepts with no stored parent, insertion order.
    std::vector<std::string> roots() const {
        std::vector<std::string> out;
        for (const auto& id : order_)
            if (parents(id).empty()) out.push_back(id);
        return out;
    }

    std::vector<std::string> leaves() const {
        std::vector<std::string> out;
        for (const auto& id : order_)
            if (children(id).empty()) out.push_back(id);
        return out;
    }

    bool is_leaf(const std::string& id) const { return children(id).empty(); }

    // True when `ancestor` has a directed path to `node` (strict: equal ids
    // do not count).
    bool is_ancestor(const std::string& ancestor, const std::string& node) const {
        if (ancestor == node) return false;
        return reachable(ancestor, node, nullptr);
    }

    // Adds a single stored edge without a cycle check; bulk loaders call
    // find_cycle() once afterwards. Returns false for duplicates.
    bool add_edge_unchecked(const std::string& parent, const std::string& child) {
        if (!has_concept(parent) || !has_concept(child))
            throw Error("edge references unknown concept: " + parent + " -> " + child);
        if (parent == child) throw Error("self-edge on " + parent);
        if (parent == pseudo_leaf_ || parent == pseudo_root_ ||
            child == pseudo_root_ || child == pseudo_leaf_)
            throw Error("pseudo nodes cannot take stored edges");
        if (has_edge(parent, child)) return false;
        add_edge(parent, child);
        return true;
    }

    // Some directed path from -> to over stored edges, or empty when none.
    std::vector<std::string> find_path(const std::string& from, const std::string& to) const {
        std::vector<std::string> stack{from};
        std::unordered_map<std::string, std::string> pred;
        std::unordered_set<std::string> seen{from};
        while (!stack.empty()) {
            std::string node = stack.back();
            stack.pop_back();
            for (const auto& c : children(node)) {
                if (!seen.insert(c).second) continue;
                pred[c] = node;
                if (c == to) {
                    std::vector<std::string> path{to};
                    std::string cur = to;
                    while (cur != from) { cur = pred[cur]; path.push_back(cur); }
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                stack.push_back(c);
            }
        }
        return {};
    }

    // One directed cycle among stored edges, or nullopt if acyclic.
    std::optional<std::vector<std::string>> find_cycle() const {
        enum Color { White, Gray, Black };
        std::unordered_map<std::string, Color> color;
        std::unordered_map<std::string, std::string> pred;
        for (const auto& start : order_) {
            if (color[start] != White) continue;
            std::vector<std::pair<std::string, size_t>> stack{{start, 0}};
            color[start] = Gray;
            while (!stack.empty()) {
                auto& [node, idx] = stack.back();
                const auto& kids = children(node);
                if (idx < kids.size()) {
                    const std::string& c = kids[idx++];
                    if (color[c] == Gray) {
                        std::vector<std::string> cycle{c};
                        std::string cur = node;
                        while (cur != c) { cycle.push_back(cur); cur = pred[cur]; }
                        cycle.push_back(c);
                        std::reverse(cycle.begin(), cycle.end());
                        return cycle;
                    }
                    if (color[c] == White) {
                        color[c] = Gray;
                        pred[c] = node;
                        stack.emplace_back(c, 0);
                    }
                } else {
                    color[node] = Black;
                    stack.pop_back();
                }
            }
        }
        return std::nullopt;
    }

    // Inserts the two edges implied by the placement. Placements that would
    // close a directed cycle among non-pseudo concepts are rejected as a
    // whole and leave the taxonomy untouched.
    ApplyResult apply_placement(const Placement& p) {
        if (p.parent == p.query || p.child == p.query)
            throw Error("placement references the query as its own parent or child: " + p.query);
        if (p.parent == pseudo_leaf_) throw Error("pseudo-leaf cannot be a parent");
        if (p.child == pseudo_root_) throw Error("pseudo-root cannot be a child");
        for (const auto& id : {p.parent, p.query, p.child})
            if (!has_concept(id)) throw Error("placement references unknown concept: " + id);

        std::vector<std::pair<std::string, std::string>> to_add;
        if (p.parent != pseudo_root_) to_add.emplace_back(p.parent, p.query);
        if (p.child != pseudo_leaf_) to_add.emplace_back(p.query, p.child);

        std::vector<std::pair<std::string, std::string>> extra;
        for (const auto& [from, to] : to_add) {
            // from->to closes a cycle iff `to` already reaches `from`.
            if (to == from || reachable(to, from, &extra)) return ApplyResult::RejectedCycle;
            extra.emplace_back(from, to);
        }
        for (const auto& [from, to] : to_add) add_edge(from, to);
        return ApplyResult::Applied;
    }

    // Canonical root-to-concept path, both endpoints included. Among the
    // shortest paths the smallest-id predecessor wins at every hop.
    std::vector<std::string> path_to_root(const std::string& id) const {
        if (!has_concept(id)) throw Error("unknown concept id: " + id);
        if (id == pseudo_leaf_) throw Error("pseudo-leaf has no root path");
        auto levels = bfs_from_root();
        return path_from_levels(levels, id);
    }

    // Depth (node count along the canonical path) of the deepest common
    // ancestor; the pseudo-root itself has depth 1.
    size_t lca_depth(const std::string& a, const std::string& b) const {
        auto levels = bfs_from_root();
        auto pa = path_from_levels(levels, a);
        auto pb = path_from_levels(levels, b);
        size_t n = std::min(pa.size(), pb.size());
        size_t common = 0;
        while (common < n && pa[common] == pb[common]) ++common;
        return common;
    }

    // Drops every candidate that is a strict ancestor of another candidate.
    std::vector<std::string> most_specific(const std::vector<std::string>& candidates) const {
        if (candidates.empty()) throw Error("most_specific: empty candidate set");
        for (const auto& id : candidates)
            if (!has_concept(id)) throw Error("unknown concept id: " + id);
        std::vector<std::string> out;
        for (const auto& a : candidates) {
            bool dominated = false;
            for (const auto& b : candidates) {
                if (a != b && is_ancestor(a, b)) { dominated = true; break; }
            }
            if (!dominated) out.push_back(a);
        }
        return out;
    }

    TaxonomyStats stats() const {
        TaxonomyStats s;
        s.node_count = order_.size();
        s.edge_count = edges_.size();
        if (order_.empty()) return s;
        for (const auto& id : order_)
            if (children(id).empty()) ++s.leaf_count;
        auto levels = bfs_from_root();
        for (const auto& id : order_) {
            auto it = levels.dist.find(id);
            if (it == levels.dist.end()) continue;
            s.depth = std::max(s.depth, it->second);  // dist already excludes the pseudo-root level
        }
        s.leaf_ratio = static_cast<double>(s.leaf_count) / static_cast<double>(s.node_count);
        size_t non_leaf = s.node_count - s.leaf_count;
        s.branching_factor = non_leaf == 0 ? 0.0
            : static_cast<double>(s.edge_count) / static_cast<double>(non_leaf);
        return s;
    }

    struct RootLevels {
        std::unordered_map<std::string, size_t> dist;  // hops from pseudo-root
        std::unordered_map<std::string, std::string> pred;
    };

    // One BFS shared by path/lca/metric bulk computations.
    RootLevels bfs_from_root() const {
        RootLevels lv;
        lv.dist[pseudo_root_] = 0;
        std::deque<std::string> frontier{pseudo_root_};
        while (!frontier.empty()) {
            std::string node = frontier.front();
            frontier.pop_front();
            size_t d = lv.dist[node];
            const std::vector<std::string>* next;
            std::vector<std::string> root_children;
            if (node == pseudo_root_) {
                root_children = roots();
                next = &root_children;
            } else {
                next = &children(node);
            }
            for (const auto& c : *next) {
                auto it = lv.dist.find(c);
                if (it == lv.dist.end()) {
                    lv.dist[c] = d + 1;
                    lv.pred[c] = node;
                    frontier.push_back(c);
                } else if (it->second == d + 1 && lv.pred[c] > node) {
                    lv.pred[c] = node;  // shortest-path tie: smallest parent id wins
                }
            }
        }
        return lv;
    }

    std::vector<std::string> path_from_levels(const RootLevels& lv, const std::string& id) const {
        if (!lv.dist.count(id))
            throw Error("concept not reachable from pseudo-root: " + id);
        std::vector<std::string> path;
        std::string cur = id;
        while (cur != pseudo_root_) {
            path.push_back(cur);
            cur = lv.pred.at(cur);
        }
        path.push_back(pseudo_root_);
        std::reverse(path.begin(), path.end());
        return path;
    }

private:
    static std::string edge_key(const std::string& parent, const std::string& child) {
        return parent + "\t" + child;
    }

    std::string add_concept_internal(const std::string& label, const std::string& description,
                                     bool is_pseudo) {
        std::string trimmed = trim(label);
        if (trimmed.empty()) throw Error("concept label is empty");
        std::string id = normalize_label(trimmed);
        auto it = concepts_.find(id);
        if (it != concepts_.end()) {
            if (it->second.description.empty() && !description.empty())
                it->second.description = description;
            return id;
        }
        concepts_.emplace(id, Concept{id, trimmed, description, is_pseudo});
        if (!is_pseudo) order_.push_back(id);
        if (is_pseudo) {
            if (pseudo_root_.empty()) pseudo_root_ = id;
            else pseudo_leaf_ = id;
        }
        return id;
    }

    void add_edge(const std::string& parent, const std::string& child) {
        std::string key = edge_key(parent, child);
        if (edge_set_.count(key)) return;
        edge_set_.insert(std::move(key));
        edges_.emplace_back(parent, child);
        children_[parent].push_back(child);
        parents_[child].push_back(parent);
    }

    // DFS over stored edges; `extra` holds tentative edges under test.
    bool reachable(const std::string& from, const std::string& to,
                   const std::vector<std::pair<std::string, std::string>>* extra) const {
        if (from == to) return true;
        std::vector<std::string> stack{from};
        std::unordered_set<std::string> seen{from};
        while (!stack.empty()) {
            std::string node = stack.back();
            stack.pop_back();
            auto visit = [&](const std::string& c) {
                if (c == to) return true;
                if (seen.insert(c).second) stack.push_back(c);
                return false;
            };
            for (const auto& c : children(node))
                if (visit(c)) return true;
            if (extra)
                for (const auto& [f, t] : *extra)
                    if (f == node && visit(t)) return true;
        }
        return false;
    }

    std::unordered_map<std::string, Concept> concepts_;
    std::vector<std::string> order_;
    std::vector<std::pair<std::string, std::string>> edges_;
    std::unordered_set<std::string> edge_set_;
    std::unordered_map<std::string, std::vector<std::string>> children_;
    std::unordered_map<std::string, std::vector<std::string>> parents_;
    std::string pseudo_root_;
    std::string pseudo_leaf_;
};

}  // namespace taxoforge
