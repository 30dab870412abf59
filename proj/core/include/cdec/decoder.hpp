#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdec/dataset.hpp"
#include "cdec/matrix.hpp"
#include "cdec/params.hpp"
#include "cdec/tape.hpp"

namespace cdec {

// Head architecture. Queries never attend to each other, so predictions
// for one class are independent of which other classes are queried.
struct DecoderConfig {
    std::size_t d_model = 512;
    std::size_t n_heads = 8;
    std::size_t ffn_mult = 4;
    std::size_t group_factor = 1;  // classes per decoded token
    std::size_t n_layers = 1;
    double ln_eps = 1e-5;

    std::size_t d_k() const { return d_model / n_heads; }
    std::size_t token_count_for(std::size_t class_count) const {
        return (class_count + group_factor - 1) / group_factor;
    }

    void validate() const;  // throws ConfigError
};

// Projected, frozen per-class queries. With group_factor g > 1 the bank
// holds one pooled query per group of g consecutive classes.
struct QueryBank {
    Matrix queries;                       // token_count x d_model
    std::vector<std::uint32_t> class_ids; // classes covered, in score order
};

// All trainable tensors of the head, deterministically initialized:
// uniform +-sqrt(6/fan_in) for projections, zeros for biases, ones/zeros
// for layer norms. The group projection (`group_fc.weight`) is one tensor
// shared across every query position.
ParamSet init_decoder_params(const DecoderConfig& cfg, std::size_t d_text,
                             std::size_t d_in, std::uint64_t seed);

// softmax(Q K^T / sqrt(d_k)) V. Q: q x d_k, K: n x d_k, V: n x d_v.
Matrix cross_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                       std::size_t d_k);

// Records the head's forward pass on a tape. When `trainable` is set the
// decoder tensors register as named tape parameters; otherwise they enter
// as constants (inference).
class DecoderGraph {
public:
    DecoderGraph(Tape& tape, const ParamSet& params, const DecoderConfig& cfg,
                 bool trainable);

    // (C x d_text) -> (token_count x d_model): trainable input projection,
    // then mean pooling over each group of g consecutive classes.
    NodeId project_queries(NodeId text_embeddings, std::size_t class_count);

    // Cross-attention + FFN stack: queries (T x d_model), image tokens
    // (N x d_in) -> decoded tokens (T x d_model).
    NodeId forward(NodeId queries, NodeId image_tokens);

    // Shared group projection: decoded tokens -> per-class logits (C x 1).
    NodeId logits(NodeId decoded, std::size_t class_count);

private:
    NodeId param(const std::string& name);

    Tape& tape_;
    DecoderConfig cfg_;
    std::vector<std::pair<std::string, NodeId>> nodes_;
};

// Inference conveniences (each builds a scratch tape internally).
QueryBank build_query_bank(const Matrix& text_embeddings,
                           const std::vector<std::uint32_t>& class_ids,
                           const ParamSet& params, const DecoderConfig& cfg);
Matrix decoder_forward(const Matrix& image_tokens, const QueryBank& bank,
                       const ParamSet& params, const DecoderConfig& cfg);
Matrix group_fc(const Matrix& decoded, const ParamSet& params,
                const DecoderConfig& cfg, std::size_t class_count);

// Sigmoid scores in bank class order (class_count x 1).
Matrix predict(const SampleRecord& record, const QueryBank& bank,
               const ParamSet& params, const DecoderConfig& cfg);

}  // namespace cdec
