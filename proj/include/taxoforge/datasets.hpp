#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "taxoforge/taxonomy.hpp"
#include "taxoforge/util.hpp"

namespace taxoforge {

// File formats (UTF-8, tab-separated, `#` starts a comment line):
//   edge list:     parent_id<TAB>child_id
//   labels:        id<TAB>label
//   descriptions:  id<TAB>description
//   gold:          query_id<TAB>parent_id<TAB>child_id
//   concept list:  label[<TAB>description]

struct SplitSpec {
    double train_fraction = 0.8;
    double val_fraction = 0.1;
    double test_fraction = 0.1;
    uint64_t seed = 0;

    void validate() const {
        for (double f : {train_fraction, val_fraction, test_fraction})
            if (f <= 0.0 || f >= 1.0) throw Error("split fractions must lie in (0,1)");
        double sum = train_fraction + val_fraction + test_fraction;
        if (std::abs(sum - 1.0) > 1e-9) throw Error("split fractions must sum to 1");
    }
};

struct QueryGold {
    Concept query;
    std::vector<Placement> gold;  // empty -> retained but unscoreable

    bool scoreable() const { return !gold.empty(); }
};

struct DatasetBundle {
    Taxonomy seed_taxonomy;
    std::vector<QueryGold> val_queries;
    std::vector<QueryGold> test_queries;
};

namespace detail {

inline std::vector<std::vector<std::string>> read_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(split(line, '\t'));
    }
    return rows;
}

inline std::ofstream open_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    return out;
}

}  // namespace detail

// Loads edge/label/description files into a taxonomy. Parentless concepts
// sit under the pseudo-root implicitly; childless ones are leaves. Duplicate
// edges are dropped with a warning; a cycle in the input is fatal.
inline Taxonomy load_taxonomy(const std::string& edge_file, const std::string& label_file,
                              const std::string& description_file = "") {
    Taxonomy tax;
    std::unordered_map<std::string, std::string> trans;  // file id -> concept id

    for (const auto& row : detail::read_tsv(label_file)) {
        if (row.size() < 2) throw Error(label_file + ": expected id<TAB>label");
        trans[row[0]] = tax.add_concept(row[1]);
    }

    auto resolve = [&](const std::string& raw) {
        auto it = trans.find(raw);
        return it != trans.end() ? it->second : tax.add_concept(raw);
    };

    size_t duplicates = 0;
    for (const auto& row : detail::read_tsv(edge_file)) {
        if (row.size() < 2) throw Error(edge_file + ": expected parent<TAB>child");
        std::string parent = resolve(row[0]);
        std::string child = resolve(row[1]);
        if (parent == tax.pseudo_root() || child == tax.pseudo_leaf()) continue;  // bookkeeping only
        if (parent == child) throw Error(edge_file + ": self-edge on " + parent);
        if (!tax.add_edge_unchecked(parent, child)) ++duplicates;
    }
    if (duplicates > 0)
        log_warn(edge_file + ": dropped " + std::to_string(duplicates) + " duplicate edge(s)");
    if (auto cycle = tax.find_cycle())
        throw Error(edge_file + ": input contains a cycle: " + join(*cycle, " -> "));

    if (!description_file.empty()) {
        for (const auto& row : detail::read_tsv(description_file)) {
            if (row.size() < 2) continue;
            auto it = trans.find(row[0]);
            std::string id = it != trans.end() ? it->second : normalize_label(row[0]);
            if (tax.has_concept(id)) tax.set_description(id, row[1]);
            else log_warn(description_file + ": description for unknown concept " + row[0]);
        }
    }
    return tax;
}

namespace detail {

struct SurvivorSets {
    std::map<std::string, std::set<std::string>> parents;
    std::map<std::string, std::set<std::string>> children;
};

// Nearest surviving ancestors/descendants across chains of removed nodes.
inline SurvivorSets surviving_neighbors(const Taxonomy& tax,
                                        const std::unordered_set<std::string>& removed) {
    SurvivorSets out;
    std::map<std::string, std::set<std::string>> par_memo, child_memo;

    auto up = [&](auto&& self, const std::string& node) -> const std::set<std::string>& {
        auto it = par_memo.find(node);
        if (it != par_memo.end()) return it->second;
        std::set<std::string>& result = par_memo[node];
        for (const auto& p : tax.parents(node)) {
            if (removed.count(p)) {
                const auto& rec = self(self, p);
                result.insert(rec.begin(), rec.end());
            } else {
                result.insert(p);
            }
        }
        return result;
    };
    auto down = [&](auto&& self, const std::string& node) -> const std::set<std::string>& {
        auto it = child_memo.find(node);
        if (it != child_memo.end()) return it->second;
        std::set<std::string>& result = child_memo[node];
        for (const auto& c : tax.children(node)) {
            if (removed.count(c)) {
                const auto& rec = self(self, c);
                result.insert(rec.begin(), rec.end());
            } else {
                result.insert(c);
            }
        }
        return result;
    };

    for (const auto& node : removed) {
        out.parents[node] = up(up, node);
        out.children[node] = down(down, node);
    }
    return out;
}

struct ExclusionResult {
    Taxonomy taxonomy;
    std::map<std::string, std::vector<Placement>> gold;  // removed node -> triplets vs. survivors
};

// Removes a node set, bridging every surviving (ancestor, descendant) pair
// around removed chains, and records each removed node's gold placements
// against the surviving graph.
inline ExclusionResult exclude_nodes(const Taxonomy& tax,
                                     const std::unordered_set<std::string>& removed) {
    ExclusionResult res;
    Taxonomy& seed = res.taxonomy;
    for (const auto& id : tax.concept_order()) {
        if (removed.count(id)) continue;
        const Concept& c = tax.concept_by_id(id);
        seed.add_concept(c.label, c.description);
    }
    for (const auto& [p, c] : tax.edges()) {
        if (removed.count(p) || removed.count(c)) continue;
        seed.add_edge_unchecked(p, c);
    }

    // Bridging keeps acyclicity: every bridge joins an ancestor to one of
    // its descendants in the original DAG.
    SurvivorSets sets = surviving_neighbors(tax, removed);
    for (const auto& node : removed) {
        const auto& sp = sets.parents.at(node);
        const auto& sc = sets.children.at(node);
        for (const auto& a : sp) {
            if (a == tax.pseudo_root()) continue;
            for (const auto& b : sc) seed.add_edge_unchecked(a, b);
        }
    }

    for (const auto& node : removed) {
        std::set<std::string> sp = sets.parents.at(node);
        std::set<std::string> sc = sets.children.at(node);
        if (sp.empty()) sp.insert(tax.pseudo_root());
        if (sc.empty()) sc.insert(tax.pseudo_leaf());
        std::vector<Placement>& triplets = res.gold[node];
        for (const auto& a : sp)
            for (const auto& b : sc)
                triplets.push_back({a, node, b});
    }
    return res;
}

}  // namespace detail

// Splits by excluding val/test nodes (never roots) from the graph and
// bridging parents of excluded nodes with their children. Deterministic
// under the spec's seed.
inline DatasetBundle split(const Taxonomy& tax, const SplitSpec& spec) {
    spec.validate();
    const auto& order = tax.concept_order();
    if (order.size() <= 10) throw Error("taxonomy too small to split (need > 10 concepts)");

    std::vector<std::string> eligible;
    for (const auto& id : order)
        if (!tax.parents(id).empty()) eligible.push_back(id);

    size_t n_val = static_cast<size_t>(spec.val_fraction * static_cast<double>(order.size()));
    size_t n_test = static_cast<size_t>(spec.test_fraction * static_cast<double>(order.size()));
    if (n_val == 0 || n_test == 0) throw Error("split fractions leave an empty query split");
    if (n_val + n_test > eligible.size())
        throw Error("split fractions leave too few seed nodes");
    if (order.size() - n_val - n_test < 1) throw Error("split leaves no seed nodes");

    std::vector<std::string> shuffled = eligible;
    std::mt19937_64 rng(spec.seed);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    std::set<std::string> val_ids(shuffled.begin(), shuffled.begin() + n_val);
    std::set<std::string> test_ids(shuffled.begin() + n_val, shuffled.begin() + n_val + n_test);
    std::unordered_set<std::string> removed;
    removed.insert(val_ids.begin(), val_ids.end());
    removed.insert(test_ids.begin(), test_ids.end());

    detail::ExclusionResult ex = detail::exclude_nodes(tax, removed);

    DatasetBundle bundle;
    bundle.seed_taxonomy = std::move(ex.taxonomy);
    auto collect = [&](const std::set<std::string>& ids, std::vector<QueryGold>& out) {
        for (const auto& id : ids)
            out.push_back({tax.concept_by_id(id), ex.gold.at(id)});
    };
    collect(val_ids, bundle.val_queries);
    collect(test_ids, bundle.test_queries);
    return bundle;
}

// All non-pseudo concepts without children, descriptions included.
inline std::vector<Concept> leaves_only(const Taxonomy& tax) {
    std::vector<Concept> out;
    for (const auto& id : tax.leaves())
        out.push_back(tax.concept_by_id(id));
    return out;
}

// --- serialization ---------------------------------------------------------

inline void write_edge_file(const Taxonomy& tax, const std::string& path) {
    auto out = detail::open_out(path);
    for (const auto& [p, c] : tax.edges()) out << p << "\t" << c << "\n";
}

inline void write_label_file(const Taxonomy& tax, const std::string& path) {
    auto out = detail::open_out(path);
    for (const auto& id : tax.concept_order())
        out << id << "\t" << tax.concept_by_id(id).label << "\n";
}

inline void write_description_file(const Taxonomy& tax, const std::string& path) {
    auto out = detail::open_out(path);
    for (const auto& id : tax.concept_order()) {
        const Concept& c = tax.concept_by_id(id);
        if (!c.description.empty()) out << id << "\t" << c.description << "\n";
    }
}

inline void write_gold_file(const std::vector<QueryGold>& queries, const std::string& path) {
    auto out = detail::open_out(path);
    for (const auto& q : queries)
        for (const auto& p : q.gold)
            out << p.query << "\t" << p.parent << "\t" << p.child << "\n";
}

inline std::map<std::string, std::vector<Placement>> read_gold_file(const std::string& path) {
    std::map<std::string, std::vector<Placement>> gold;
    for (const auto& row : detail::read_tsv(path)) {
        if (row.size() < 3) throw Error(path + ": expected query<TAB>parent<TAB>child");
        gold[row[0]].push_back({row[1], row[0], row[2]});
    }
    return gold;
}

inline void write_concept_file(const std::vector<Concept>& concepts, const std::string& path) {
    auto out = detail::open_out(path);
    for (const auto& c : concepts) {
        out << c.label;
        if (!c.description.empty()) out << "\t" << c.description;
        out << "\n";
    }
}

inline std::vector<Concept> read_concept_file(const std::string& path) {
    std::vector<Concept> out;
    std::set<std::string> seen;
    for (const auto& row : detail::read_tsv(path)) {
        Concept c;
        c.label = trim(row[0]);
        if (c.label.empty()) continue;
        c.id = normalize_label(c.label);
        if (!seen.insert(c.id).second) continue;
        if (row.size() > 1) c.description = row[1];
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace taxoforge
