#include "cdec/prompts.hpp"

#include "cdec/errors.hpp"

namespace cdec {

namespace {

constexpr const char* kPlaceholder = "{labels}";

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void PromptTemplate::validate() const {
    std::size_t first = pattern.find(kPlaceholder);
    if (first == std::string::npos) {
        throw TemplateError("template '" + id + "': missing {labels} placeholder");
    }
    if (pattern.find(kPlaceholder, first + 1) != std::string::npos) {
        throw TemplateError("template '" + id + "': more than one {labels} placeholder");
    }
}

RenderedPrompt render_prompt(const std::vector<std::string>& labels,
                             const PromptTemplate& tmpl) {
    tmpl.validate();
    if (labels.empty()) {
        throw ArgumentError("render_prompt: empty label list");
    }
    std::vector<std::string> clean;
    clean.reserve(labels.size());
    for (const std::string& raw : labels) {
        std::string label = trimmed(raw);
        if (label.empty()) {
            throw ArgumentError("render_prompt: blank label");
        }
        if (label.find(',') != std::string::npos) {
            throw ArgumentError("render_prompt: label '" + label + "' contains a comma");
        }
        clean.push_back(std::move(label));
    }

    std::string joined;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        if (i > 0) {
            joined += (i + 1 == clean.size()) ? " and " : ", ";
        }
        joined += clean[i];
    }

    std::size_t pos = tmpl.pattern.find(kPlaceholder);
    std::string text = tmpl.pattern;
    text.replace(pos, std::string(kPlaceholder).size(), joined);
    return RenderedPrompt{std::move(text), std::move(clean), tmpl.id};
}

std::vector<RenderedPrompt> render_class_prompts(const ClassVocabulary& vocab,
                                                 const PromptTemplate& tmpl) {
    vocab.validate();
    std::vector<RenderedPrompt> out;
    out.reserve(vocab.size());
    for (const auto& entry : vocab.classes) {
        out.push_back(render_prompt({entry.name}, tmpl));
    }
    return out;
}

std::vector<PromptTemplate> builtin_templates() {
    return {
        {"photo", "a photo of {labels}"},
        {"picture", "a picture of {labels}"},
        {"bare", "{labels}"},
    };
}

PromptTemplate find_template(const std::string& id) {
    for (PromptTemplate& t : builtin_templates()) {
        if (t.id == id) return t;
    }
    throw ArgumentError("unknown template '" + id + "'");
}

}  // namespace cdec
