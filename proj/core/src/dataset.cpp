#include "cdec/dataset.hpp"

#include <string>

#include "cdec/errors.hpp"

namespace cdec {

void Dataset::validate() const {
    vocab.validate();
    if (records.empty()) return;
    const std::size_t n = records.front().tokens.rows();
    const std::size_t din = records.front().tokens.cols();
    const std::size_t dtext = records.front().text_embedding.cols();
    if (n < 1 || din < 1) {
        throw ConsistencyError("dataset: record 0 has empty token matrix");
    }
    for (std::size_t r = 0; r < records.size(); ++r) {
        const SampleRecord& rec = records[r];
        if (rec.tokens.rows() != n || rec.tokens.cols() != din) {
            throw ConsistencyError("dataset: record " + std::to_string(r) +
                                   " token shape " + rec.tokens.shape_str() +
                                   " differs from record 0");
        }
        if (rec.text_embedding.cols() != dtext ||
            (dtext > 0 && rec.text_embedding.rows() != 1)) {
            throw ConsistencyError("dataset: record " + std::to_string(r) +
                                   " text embedding shape mismatch");
        }
        for (std::uint32_t c : rec.labels) {
            if (c >= vocab.size()) {
                throw ConsistencyError("dataset: record " + std::to_string(r) +
                                       " label index " + std::to_string(c) +
                                       " out of range for " +
                                       std::to_string(vocab.size()) + " classes");
            }
        }
    }
}

}  // namespace cdec
