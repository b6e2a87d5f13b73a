#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taxoforge/retrieval.hpp"
#include "taxoforge/taxonomy.hpp"
#include "taxoforge/util.hpp"

namespace taxoforge {

enum class Mode { Completion, Generation };

inline constexpr const char* kCotTrigger = "Reasoning: Let's think step by step in order to";

// The model signals "no parent" / "no child" with the pseudo node labels.
inline bool is_pseudo_root_marker(const std::string& label) {
    std::string n = normalize_label(label);
    return n == "pseudo-root" || n == "pseudo root" || n == "pseudo_root";
}

inline bool is_pseudo_leaf_marker(const std::string& label) {
    std::string n = normalize_label(label);
    return n == "pseudo-leaf" || n == "pseudo leaf" || n == "pseudo_leaf";
}

// Parsed parent-generation output.
struct ParentProposal {
    std::string reasoning;
    std::string interpretation;
    std::vector<std::string> parents;
    std::string parents_raw;
    std::string raw;

    bool proposes_pseudo_root() const {
        for (const auto& p : parents)
            if (is_pseudo_root_marker(p)) return true;
        return false;
    }
};

// Parsed child-selection output.
struct ChildSelection {
    std::string reasoning;
    bool is_leaf = false;
    std::vector<std::string> children;
    std::string leaf_raw;
    std::string children_raw;
    std::string raw;

    bool selects_pseudo_leaf() const {
        if (is_leaf) return true;
        for (const auto& c : children)
            if (is_pseudo_leaf_marker(c)) return true;
        return false;
    }
};

// Re-prompt payload after failed assertions.
struct ParentFeedback {
    std::string reasoning;        // rendered as "Previous Reasoning:"
    std::string interpretation;   // "Previous Interpretation:"
    std::string parents;          // "Previous Parents:"
    std::string instructions;     // "Instructions:"
};

struct ChildFeedback {
    std::string reasoning;
    std::string leaf;
    std::string children;
    std::string instructions;
};

// Worked examples for few-shot prompts.
struct ParentDemo {
    std::vector<std::string> context_lines;
    std::string child_label;
    std::string description;
    std::string reasoning;        // continuation after the CoT trigger
    std::string interpretation;
    std::string parents;
};

struct ChildDemo {
    std::vector<std::string> context_lines;  // leaf-annotated
    std::string candidates;
    std::string parent_label;
    std::string description;
    std::string interpretation;
    std::string reasoning;
    std::string leaf;
    std::string children;
};

namespace detail {

inline constexpr const char* kSep = "\n\n---\n\n";

inline std::string fenced(const std::vector<std::string>& lines) {
    if (lines.empty()) return "```\n```";
    return "```" + join(lines, "\n") + "```";
}

inline constexpr const char* kParentInstruction =
    "Which are the most specific parent concepts of the given child concept in a taxonomy "
    "considering the context?\n"
    "In your reasoning, state how the parent concepts are a supertype of the child concept.\n"
    "Do not add additional comments or information, only return the output in the described "
    "format.";

inline constexpr const char* kChildInstruction =
    "Which of the candidates are child concepts (subtypes) of the given parent concept "
    "(supertype) in a taxonomy?\n"
    "The context shows existing parent and child concepts and whether the children are leaves.\n"
    "In your reasoning, state how the parent concept is a supertype of the selected child "
    "concepts.\n"
    "Do not add additional comments or information, only return the output in the described "
    "format.";

inline constexpr const char* kContextDesc =
    "Context: List of existing parent-child (supertype-subtype) relations in the taxonomy.";

inline constexpr const char* kTaxonomyDescriptionDesc =
    "Taxonomy Description: Description of the taxonomy";

inline constexpr const char* kParentsFieldCompletion =
    "Parents: Comma separated list of one or more parents of the child concept. Valid parents "
    "are in the context. If there are no suitable parents, return None.";

inline constexpr const char* kParentsFieldGeneration =
    "Parents: Comma separated list of one or more parents (supertypes) of the child concept. "
    "A parent concept must be a more general type of the child concept. If there are no "
    "suitable existing parents, invent them.";

inline constexpr const char* kChildrenField =
    "Children: Comma separated list of candidates that are children of the parent concept in a "
    "taxonomy.A child concept must be a type of the parent concept.Separate with commas.";

inline constexpr const char* kLeafField =
    "Leaf: Whether the parent concept should be added as a leaf (has no children). Answer with "
    "Yes or No.";

}  // namespace detail

// Fielded parent prompt per the chain-of-thought template: instruction
// block, input description, format block, optional demos, then the filled
// fields, ending exactly with the CoT trigger.
inline std::string render_parent_prompt(const EdgeContext& context, const Concept& query,
                                        Mode mode, const std::string& taxonomy_description = "",
                                        const ParentFeedback* feedback = nullptr,
                                        const std::vector<ParentDemo>& demos = {}) {
    if (mode == Mode::Completion && !taxonomy_description.empty())
        throw Error("completion prompts take no taxonomy description");
    using namespace detail;
    std::string out = kParentInstruction;
    out += kSep;

    out += "Input description.\n\n";
    out += kContextDesc;
    out += "\n\nChild: Child concept (subtype) that you need to place in a taxonomy.";
    out += "\n\nDescription: Description of the child concept.";
    if (mode == Mode::Generation) {
        out += "\n\n";
        out += kTaxonomyDescriptionDesc;
    }
    if (feedback) {
        out += "\n\nPrevious Reasoning: past Reasoning: with errors";
        out += "\n\nPrevious Interpretation: past Interpretation: with errors";
        out += "\n\nPrevious Parents: past Parents: with errors";
        out += "\n\nInstructions: Some instructions you must satisfy";
    }
    out += kSep;

    out += "Follow the following format.\n\n";
    out += kCotTrigger;
    out += " ${produce the parents}. We ...";
    out += "\n\nInterpretation: Description of the child concept in relation to the context "
           "taxonomy. Infer what is meant by the child concept from the context.";
    out += "\n\n";
    out += mode == Mode::Completion ? kParentsFieldCompletion : kParentsFieldGeneration;
    out += kSep;

    for (const auto& demo : demos) {
        out += "Context:\n" + fenced(demo.context_lines);
        out += "\n\nChild: " + demo.child_label;
        out += "\n\nDescription: " + demo.description;
        out += "\n\n";
        out += kCotTrigger;
        out += " " + demo.reasoning;
        out += "\n\nInterpretation: " + demo.interpretation;
        out += "\n\nParents: " + demo.parents;
        out += kSep;
    }

    out += "Context:\n" + fenced(context.lines);
    out += "\n\nChild: " + query.label;
    out += "\n\nDescription: " + query.description;
    if (mode == Mode::Generation && !taxonomy_description.empty())
        out += "\n\nTaxonomy Description: " + taxonomy_description;
    if (feedback) {
        out += "\n\nPrevious Reasoning: " + feedback->reasoning;
        out += "\n\nPrevious Interpretation: " + feedback->interpretation;
        out += "\n\nPrevious Parents: " + feedback->parents;
        out += "\n\nInstructions: " + feedback->instructions;
    }
    out += "\n\n";
    out += kCotTrigger;
    return out;
}

// Child-selection prompt. Identical for completion and generation; the
// context lines carry leaf annotations.
inline std::string render_child_prompt(const EdgeContext& context,
                                       const std::vector<std::string>& candidates,
                                       const Concept& query, const std::string& interpretation,
                                       const std::string& taxonomy_description = "",
                                       const ChildFeedback* feedback = nullptr,
                                       const std::vector<ChildDemo>& demos = {}) {
    using namespace detail;
    std::string out = kChildInstruction;
    out += kSep;

    out += "Input description.\n\n";
    out += kContextDesc;
    out += "\n\nCandidates: Candidate children of the concept separated by commas to select "
           "from.";
    out += "\n\nParent: Parent concept that you need to place in a taxonomy.";
    out += "\n\nDescription: Description of the parent concept.";
    if (!taxonomy_description.empty()) {
        out += "\n\n";
        out += kTaxonomyDescriptionDesc;
    }
    out += "\n\nInterpretation: Description of the child concept in relation to the taxonomy.";
    if (feedback) {
        out += "\n\nPrevious Reasoning: past Reasoning: with errors";
        out += "\n\nPrevious Leaf: past Leaf: with errors";
        out += "\n\nPrevious Children: past Children: with errors";
        out += "\n\nInstructions: Some instructions you must satisfy";
    }
    out += kSep;

    out += "Follow the following format.\n\n";
    out += kCotTrigger;
    out += " ${produce the children}. We ...";
    out += "\n\n";
    out += kLeafField;
    out += "\n\n";
    out += kChildrenField;
    out += kSep;

    for (const auto& demo : demos) {
        out += "Context:\n" + fenced(demo.context_lines);
        out += "\n\nCandidates: " + demo.candidates;
        out += "\n\nParent: " + demo.parent_label;
        out += "\n\nDescription: " + demo.description;
        out += "\n\nInterpretation: " + demo.interpretation;
        out += "\n\n";
        out += kCotTrigger;
        out += " " + demo.reasoning;
        out += "\n\nLeaf: " + demo.leaf;
        out += "\n\nChildren: " + demo.children;
        out += kSep;
    }

    out += "Context:\n" + fenced(context.lines);
    out += "\n\nCandidates: " + join(candidates, ", ");
    out += "\n\nParent: " + query.label;
    out += "\n\nDescription: " + query.description;
    if (!taxonomy_description.empty())
        out += "\n\nTaxonomy Description: " + taxonomy_description;
    out += "\n\nInterpretation: " + interpretation;
    if (feedback) {
        out += "\n\nPrevious Reasoning: " + feedback->reasoning;
        out += "\n\nPrevious Leaf: " + feedback->leaf;
        out += "\n\nPrevious Children: " + feedback->children;
        out += "\n\nInstructions: " + feedback->instructions;
    }
    out += "\n\n";
    out += kCotTrigger;
    return out;
}

inline std::string render_describe_prompt(const std::string& label) {
    if (trim(label).empty()) throw Error("cannot describe an empty label");
    return "Describe the concept \"" + label + "\" in one to three sentences. Start the "
           "description with \"" + label + " is\". Do not add additional comments or "
           "information.";
}

inline std::string render_taxonomy_description_prompt(const std::vector<std::string>& labels) {
    return "Write a paragraph on what a potential taxonomy containing the following concepts "
           "could look like. State the topic of the taxonomy and its rough structure. Do not "
           "add additional comments or information.\n\nConcepts: " + join(labels, ", ") +
           "\n\nDescription:";
}

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

// Scans for `Field:` markers at line starts, in order; each value runs to
// the next known marker or the end. A marker mentioned mid-line (as in
// "past Parents: with errors") never matches.
inline std::map<std::string, std::string> parse_fielded_output(
    const std::string& raw, const std::vector<std::string>& fields) {
    std::vector<std::string> lines = split(raw, '\n');
    std::map<std::string, std::string> out;
    std::optional<std::string> open_field;
    std::string open_value;
    size_t next_field = 0;

    auto close = [&]() {
        if (!open_field) return;
        out[*open_field] = trim(open_value);
        open_field.reset();
        open_value.clear();
    };

    for (const auto& line : lines) {
        bool matched = false;
        // only fields at or after the scan cursor can open a capture
        for (size_t i = next_field; i < fields.size(); ++i) {
            const std::string marker = fields[i] + ":";
            if (line.rfind(marker, 0) == 0) {
                close();
                open_field = fields[i];
                open_value = trim(line.substr(marker.size()));
                next_field = i + 1;
                matched = true;
                break;
            }
        }
        if (!matched && open_field) {
            open_value += open_value.empty() ? line : "\n" + line;
        }
    }
    close();
    return out;
}

// Comma list with the literal (case-insensitive) None meaning "empty".
inline std::vector<std::string> parse_label_list(const std::string& value) {
    std::vector<std::string> items;
    for (auto& item : split_list(value)) {
        std::string bare = item;
        while (!bare.empty() && (bare.back() == '.' || bare.back() == '"')) bare.pop_back();
        if (iequals(trim(bare), "none")) continue;
        items.push_back(item);
    }
    return items;
}

inline bool parse_yes_no(const std::string& value) {
    std::string bare = trim(value);
    while (!bare.empty() && (bare.back() == '.' || bare.back() == '"')) bare.pop_back();
    if (iequals(bare, "yes")) return true;
    if (iequals(bare, "no")) return false;
    throw ParseError("expected Yes or No, got: " + value);
}

// The completion text continues the prompt's trailing CoT trigger, so the
// trigger is prepended before scanning for field markers.
inline ParentProposal parse_parent_output(const std::string& raw) {
    ParentProposal p;
    p.raw = raw;
    std::string full = std::string(kCotTrigger) + " " + raw;
    auto fields = parse_fielded_output(full, {"Reasoning", "Interpretation", "Parents"});
    if (!fields.count("Parents"))
        throw ParseError("model output has no Parents: field");
    p.reasoning = fields.count("Reasoning") ? fields["Reasoning"] : "";
    p.interpretation = fields.count("Interpretation") ? fields["Interpretation"] : "";
    p.parents_raw = fields["Parents"];
    p.parents = parse_label_list(p.parents_raw);
    return p;
}

inline ChildSelection parse_child_output(const std::string& raw) {
    ChildSelection c;
    c.raw = raw;
    std::string full = std::string(kCotTrigger) + " " + raw;
    auto fields = parse_fielded_output(full, {"Reasoning", "Leaf", "Children"});
    if (!fields.count("Leaf"))
        throw ParseError("model output has no Leaf: field");
    c.reasoning = fields.count("Reasoning") ? fields["Reasoning"] : "";
    c.leaf_raw = fields["Leaf"];
    c.is_leaf = parse_yes_no(c.leaf_raw);
    c.children_raw = fields.count("Children") ? fields["Children"] : "";
    c.children = parse_label_list(c.children_raw);
    if (c.is_leaf) c.children.clear();  // a leaf has no children by definition
    return c;
}

}  // namespace taxoforge
