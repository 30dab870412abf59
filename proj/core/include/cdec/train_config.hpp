#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdec/losses.hpp"

namespace cdec {

// Training hyperparameters. Serializable as flat key=value text (see
// parse_train_config_file); every field has a key, unknown keys are errors.
struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 56;
    double learning_rate = 1e-3;
    LossWeights weights;  // alpha, beta, tau
    ClipVariant clip_variant = ClipVariant::kInfoNce;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 1;
    std::vector<std::size_t> eval_ks = {3, 5};
    // Multiplier on seen-class scores at GZSL inference; 1 = off.
    double gamma = 1.0;
    std::size_t align_dim = 64;
    std::string template_id = "photo";

    void validate() const;  // throws ConfigError
};

// key=value lines; '#' starts a comment. Unknown keys raise ConfigError.
TrainConfig parse_train_config_file(const std::string& path);
TrainConfig parse_train_config_text(const std::string& text, TrainConfig base = {});

// Fully resolved key=value rendering (round-trips through the parser).
std::string train_config_to_text(const TrainConfig& cfg);

}  // namespace cdec
