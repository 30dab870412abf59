#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cdec {

// Ordered class names with seen/unseen flags. The order defines class
// indices everywhere (files, score tables, query banks).
struct ClassVocabulary {
    struct Entry {
        std::string name;
        bool seen = true;
    };

    std::vector<Entry> classes;

    std::size_t size() const { return classes.size(); }

    // Throws ArgumentError on duplicate names or when no class is seen.
    void validate() const;

    std::vector<std::uint32_t> seen_indices() const;
    std::vector<std::uint32_t> unseen_indices() const;
};

// Partition (seen, unseen), vocabulary order preserved within each side.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>
split_seen_unseen(const ClassVocabulary& vocab);

}  // namespace cdec
