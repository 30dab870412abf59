#include "cdec/vocab.hpp"

#include <unordered_set>

#include "cdec/errors.hpp"

namespace cdec {

void ClassVocabulary::validate() const {
    if (classes.empty()) {
        throw ArgumentError("vocabulary: no classes");
    }
    std::unordered_set<std::string> names;
    bool any_seen = false;
    for (const Entry& e : classes) {
        if (e.name.empty()) {
            throw ArgumentError("vocabulary: empty class name");
        }
        if (!names.insert(e.name).second) {
            throw ArgumentError("vocabulary: duplicate class name '" + e.name + "'");
        }
        any_seen = any_seen || e.seen;
    }
    if (!any_seen) {
        throw ArgumentError("vocabulary: at least one class must be seen");
    }
}

std::vector<std::uint32_t> ClassVocabulary::seen_indices() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < classes.size(); ++i) {
        if (classes[i].seen) out.push_back(i);
    }
    return out;
}

std::vector<std::uint32_t> ClassVocabulary::unseen_indices() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < classes.size(); ++i) {
        if (!classes[i].seen) out.push_back(i);
    }
    return out;
}

std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>
split_seen_unseen(const ClassVocabulary& vocab) {
    vocab.validate();
    return {vocab.seen_indices(), vocab.unseen_indices()};
}

}  // namespace cdec
