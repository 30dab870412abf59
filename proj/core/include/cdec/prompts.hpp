#pragma once

#include <string>
#include <vector>

#include "cdec/vocab.hpp"

namespace cdec {

// A natural-language pattern with exactly one {labels} placeholder.
struct PromptTemplate {
    std::string id;
    std::string pattern;

    // Throws TemplateError unless the placeholder appears exactly once.
    void validate() const;
};

struct RenderedPrompt {
    std::string text;
    std::vector<std::string> labels;
    std::string template_id;
};

// Joins labels as "a, b and c" (comma separators, final pair joined with
// " and ", no comma before the "and") and substitutes into the template.
// Duplicate labels render as-is; labels containing commas are rejected.
RenderedPrompt render_prompt(const std::vector<std::string>& labels,
                             const PromptTemplate& tmpl);

// One prompt per class, in vocabulary order.
std::vector<RenderedPrompt> render_class_prompts(const ClassVocabulary& vocab,
                                                 const PromptTemplate& tmpl);

std::vector<PromptTemplate> builtin_templates();

// Throws ArgumentError when no builtin template has this id.
PromptTemplate find_template(const std::string& id);

}  // namespace cdec
