#pragma once

// Shared fixtures and brute-force oracles. The oracles stay independent of
// the library's graph algorithms: they enumerate paths exhaustively.

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "taxoforge/taxonomy.hpp"

namespace fixtures {

using taxoforge::Taxonomy;

// root -> c1 -> c2 -> ... -> c(n-1)
inline Taxonomy make_chain(size_t n) {
    Taxonomy tax;
    std::string prev = tax.add_concept("root");
    for (size_t i = 1; i < n; ++i) {
        std::string id = tax.add_concept("c" + std::to_string(i));
        tax.add_edge_unchecked(prev, id);
        prev = id;
    }
    return tax;
}

// Perfect binary tree with `levels` levels (7 nodes for levels=3).
inline Taxonomy make_binary_tree(size_t levels) {
    Taxonomy tax;
    size_t count = (size_t{1} << levels) - 1;
    std::vector<std::string> ids;
    for (size_t i = 1; i <= count; ++i)
        ids.push_back(tax.add_concept("n" + std::to_string(i)));
    for (size_t i = 1; i <= count; ++i) {
        if (2 * i <= count) tax.add_edge_unchecked(ids[i - 1], ids[2 * i - 1]);
        if (2 * i + 1 <= count) tax.add_edge_unchecked(ids[i - 1], ids[2 * i]);
    }
    return tax;
}

// Random DAG: nodes v0..v(n-1), edges only from lower to higher index.
inline Taxonomy random_dag(std::mt19937_64& rng, size_t max_nodes = 20) {
    Taxonomy tax;
    size_t n = 3 + rng() % (max_nodes - 2);
    std::vector<std::string> ids;
    for (size_t i = 0; i < n; ++i)
        ids.push_back(tax.add_concept("v" + std::to_string(i)));
    for (size_t j = 1; j < n; ++j) {
        size_t parents = (rng() % 4 == 0) ? 2 : 1;  // mostly a tree, some diamonds
        for (size_t k = 0; k < parents; ++k) {
            size_t i = rng() % j;
            tax.add_edge_unchecked(ids[i], ids[j]);
        }
    }
    return tax;
}

// Every root-to-target path, pseudo-root included as the first element.
inline std::vector<std::vector<std::string>> all_root_paths(const Taxonomy& tax,
                                                            const std::string& target) {
    std::vector<std::vector<std::string>> result;
    std::vector<std::string> current{tax.pseudo_root()};
    auto dfs = [&](auto&& self, const std::string& node) -> void {
        if (node == target) {
            result.push_back(current);
            return;
        }
        const auto next = node == tax.pseudo_root() ? tax.roots() : tax.children(node);
        for (const auto& c : next) {
            current.push_back(c);
            self(self, c);
            current.pop_back();
        }
    };
    dfs(dfs, tax.pseudo_root());
    return result;
}

// Canonical path oracle: among the shortest paths, minimize the label
// sequence compared backwards from the target (equivalent to picking the
// smallest immediate parent at every hop).
inline std::vector<std::string> canonical_path_oracle(const Taxonomy& tax,
                                                      const std::string& target) {
    auto paths = all_root_paths(tax, target);
    REQUIRE(!paths.empty());
    size_t best = paths[0].size();
    for (const auto& p : paths) best = std::min(best, p.size());
    std::vector<std::vector<std::string>> shortest;
    for (auto& p : paths)
        if (p.size() == best) shortest.push_back(p);
    auto backward_less = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        for (size_t i = a.size(); i-- > 0;) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return false;
    };
    return *std::min_element(shortest.begin(), shortest.end(), backward_less);
}

inline size_t lca_depth_oracle(const Taxonomy& tax, const std::string& a, const std::string& b) {
    auto pa = canonical_path_oracle(tax, a);
    auto pb = canonical_path_oracle(tax, b);
    size_t n = std::min(pa.size(), pb.size());
    size_t common = 0;
    while (common < n && pa[common] == pb[common]) ++common;
    return common;
}

inline double wps_oracle(const Taxonomy& tax, const std::string& a, const std::string& b) {
    auto pa = canonical_path_oracle(tax, a);
    auto pb = canonical_path_oracle(tax, b);
    return 2.0 * static_cast<double>(lca_depth_oracle(tax, a, b)) /
           static_cast<double>(pa.size() + pb.size());
}

inline bool reachable_oracle(const Taxonomy& tax, const std::string& from, const std::string& to) {
    std::set<std::string> visited;
    auto dfs = [&](auto&& self, const std::string& node) -> bool {
        if (node == to) return true;
        if (!visited.insert(node).second) return false;
        for (const auto& c : tax.children(node))
            if (self(self, c)) return true;
        return false;
    };
    return dfs(dfs, from);
}

}  // namespace fixtures
