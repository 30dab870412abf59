#pragma once

#include <cstdint>
#include <vector>

#include "cdec/matrix.hpp"
#include "cdec/vocab.hpp"

namespace cdec {

// One image: N spatial tokens (N x d_in), its true class indices, and
// (optionally) the text embedding of its rendered multi-label prompt
// (1 x d_text, empty when the source file carries none).
struct SampleRecord {
    Matrix tokens;
    std::vector<std::uint32_t> labels;
    Matrix text_embedding;
};

struct Dataset {
    ClassVocabulary vocab;
    std::vector<SampleRecord> records;

    std::size_t tokens_per_image() const {
        return records.empty() ? 0 : records.front().tokens.rows();
    }
    std::size_t d_in() const {
        return records.empty() ? 0 : records.front().tokens.cols();
    }
    bool has_text_embeddings() const {
        return !records.empty() && !records.front().text_embedding.empty();
    }

    // Uniform shapes, label indices in range. Throws ConsistencyError.
    void validate() const;
};

// Per-class text embeddings (one row per vocabulary class, in order).
struct QueryBankSource {
    enum class Provenance { kFile, kSynthetic };

    Matrix embeddings;  // C x d_text
    Provenance provenance = Provenance::kFile;
};

}  // namespace cdec
