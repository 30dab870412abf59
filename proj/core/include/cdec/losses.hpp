#pragma once

#include "cdec/matrix.hpp"
#include "cdec/tape.hpp"

namespace cdec {

struct LossWeights {
    double alpha = 1.0;  // alignment loss weight
    double beta = 1.0;   // classification loss weight
    double tau = 0.07;   // contrastive temperature

    void validate() const;  // throws ConfigError
};

struct LossReport {
    double total = 0.0;
    double clip = 0.0;
    double classification = 0.0;
};

enum class ClipVariant {
    kInfoNce,  // symmetric batch contrastive loss
    kCosine,   // mean per-pair cosine distance
};

// Mean over all entries of binary cross-entropy with the sigmoid folded
// into the logit formulation. targets must be 0/1 of the logits' shape.
double classification_loss(const Matrix& logits, const Matrix& targets);

// Symmetric InfoNCE over a batch of matched rows: cosine-similarity matrix
// of the L2-normalized rows divided by tau, cross-entropy against the
// diagonal, averaged over both directions. Zero for batch size 1.
double clip_alignment_loss(const Matrix& image_embeddings,
                           const Matrix& text_embeddings, double tau);

// Per-pair variant: mean over rows of (1 - cosine similarity).
double clip_alignment_loss_cosine(const Matrix& image_embeddings,
                                  const Matrix& text_embeddings);

// total = alpha * clip + beta * classification.
LossReport combined_loss(double clip, double classification,
                         const LossWeights& weights);

// Tape builders for the same quantities (gradients via Tape::backward).
NodeId classification_loss_node(Tape& tape, NodeId logits, const Matrix& targets);
NodeId clip_alignment_loss_node(Tape& tape, NodeId image_embeddings,
                                NodeId text_embeddings, double tau);
NodeId clip_alignment_cosine_node(Tape& tape, NodeId image_embeddings,
                                  NodeId text_embeddings);

}  // namespace cdec
