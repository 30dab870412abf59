#pragma once

#include <string>

#include "cdec/decoder.hpp"
#include "cdec/losses.hpp"
#include "cdec/train_config.hpp"
#include "cdec/vocab.hpp"

namespace cdec {

// Trained state: head tensors plus the alignment projections
// ("align.img_proj", "align.txt_proj"), with everything needed to rebuild
// query banks and resume evaluation.
struct Checkpoint {
    DecoderConfig decoder;
    TrainConfig train;
    ParamSet params;
    ClassVocabulary vocab;
    LossReport final_loss;
};

// Container section 3: JSON header carries both configs, the vocabulary,
// the final loss and a tensor manifest; payload is the tensors as 32-bit
// floats in manifest order.
void write_checkpoint_file(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint_file(const std::string& path);

}  // namespace cdec
