#pragma once

#include <ostream>

#include "cdec/checkpoint.hpp"
#include "cdec/dataset.hpp"
#include "cdec/metrics.hpp"

namespace cdec {

enum class Protocol {
    kZsl,   // evaluate over unseen classes only
    kGzsl,  // evaluate over the seen/unseen union
};

// Trains the head on seen classes only: per batch, decode every record
// against the projected seen-class queries, take the weighted sum of the
// alignment and classification losses, backprop, Adam step. Deterministic
// for a fixed (dataset, config, seed). A record with an unseen-class label
// raises ProtocolError. `log` (optional) receives one JSON line per step.
Checkpoint train(const Dataset& train_data, const QueryBankSource& bank,
                 const DecoderConfig& dcfg, const TrainConfig& tcfg,
                 std::ostream* log = nullptr);

// Builds the query bank for the mode's class set from the (frozen) text
// embeddings and the trained input projection, scores every record, and
// computes metrics over that class set. In GZSL mode seen-class scores are
// multiplied by the checkpoint's gamma before ranking. ZSL mode requires
// every test label to be unseen (ProtocolError otherwise).
MetricsReport evaluate(const Checkpoint& ckpt, const Dataset& test_data,
                       const QueryBankSource& bank, Protocol mode);

struct AblationResult {
    MetricsReport joint;                // alpha as configured
    MetricsReport classification_only;  // alpha = 0
    double map_delta = 0.0;             // joint.map - classification_only.map
};

// Two runs differing only in alpha, same seed (identical initialization),
// both evaluated on the ZSL test set.
AblationResult ablation_run(const Dataset& train_data, const Dataset& test_zsl,
                            const QueryBankSource& bank, const DecoderConfig& dcfg,
                            const TrainConfig& tcfg, std::ostream* log = nullptr);

}  // namespace cdec
