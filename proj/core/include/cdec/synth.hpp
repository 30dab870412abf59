#pragma once

#include <cstdint>

#include "cdec/dataset.hpp"

namespace cdec {

// Seeded synthetic stand-in for the text/image encoder outputs. One
// unit-norm prototype per class; a class text embedding is its noised,
// re-normalized prototype; an image's tokens are the mean of its label
// set's prototypes pushed through a fixed seeded linear map into image
// space, plus noise. Fully determined by this config.
struct SynthConfig {
    std::uint32_t class_count = 40;
    double seen_fraction = 0.8;
    std::uint32_t train_count = 800;
    std::uint32_t test_count = 200;  // per evaluation protocol
    std::uint32_t tokens_per_image = 9;
    std::uint32_t d_in = 64;
    std::uint32_t d_text = 32;
    std::uint32_t labels_min = 1;
    std::uint32_t labels_max = 3;
    double sigma_img = 0.05;
    double sigma_text = 0.05;
    std::uint64_t seed = 1;

    void validate() const;  // throws ConfigError
};

struct SynthDataset {
    ClassVocabulary vocab;
    std::vector<SampleRecord> train;      // seen-only label sets
    std::vector<SampleRecord> test_zsl;   // unseen-only label sets
    std::vector<SampleRecord> test_gzsl;  // label sets drawn from the union
    QueryBankSource query_bank;
    Matrix prototypes;  // C x d_text, unit rows (exposed for oracle tests)

    Dataset train_dataset() const { return {vocab, train}; }
    Dataset test_zsl_dataset() const { return {vocab, test_zsl}; }
    Dataset test_gzsl_dataset() const { return {vocab, test_gzsl}; }
};

SynthDataset generate_synthetic_dataset(const SynthConfig& cfg);

}  // namespace cdec
