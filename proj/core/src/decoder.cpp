#include "cdec/decoder.hpp"

#include <cmath>

#include "cdec/errors.hpp"
#include "cdec/rng.hpp"

namespace cdec {

namespace {

Matrix kaiming_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in,
                       Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) {
        m.data()[i] = rng.uniform(-bound, bound);
    }
    return m;
}

// T x C pooling matrix averaging each group of g consecutive classes.
Matrix group_pool_matrix(std::size_t class_count, std::size_t g) {
    const std::size_t tokens = (class_count + g - 1) / g;
    Matrix pool(tokens, class_count);
    for (std::size_t t = 0; t < tokens; ++t) {
        const std::size_t begin = t * g;
        const std::size_t end = std::min(begin + g, class_count);
        const double w = 1.0 / static_cast<double>(end - begin);
        for (std::size_t c = begin; c < end; ++c) pool.at(t, c) = w;
    }
    return pool;
}

}  // namespace

void DecoderConfig::validate() const {
    if (d_model < 1 || n_heads < 1 || ffn_mult < 1 || group_factor < 1 ||
        n_layers < 1) {
        throw ConfigError("decoder config: all sizes must be >= 1");
    }
    if (d_model % n_heads != 0) {
        throw ConfigError("decoder config: d_model " + std::to_string(d_model) +
                          " not divisible by n_heads " + std::to_string(n_heads));
    }
    if (ln_eps < 0.0) {
        throw ConfigError("decoder config: ln_eps must be >= 0");
    }
}

ParamSet init_decoder_params(const DecoderConfig& cfg, std::size_t d_text,
                             std::size_t d_in, std::uint64_t seed) {
    cfg.validate();
    if (d_text < 1 || d_in < 1) {
        throw ConfigError("decoder params: d_text and d_in must be >= 1");
    }
    Rng rng(derive_seed(seed, "decoder-init"));
    const std::size_t dm = cfg.d_model;
    const std::size_t dff = cfg.ffn_mult * dm;

    ParamSet p;
    p.add("query_proj", kaiming_uniform(d_text, dm, d_text, rng));
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        p.add(prefix + "attn.wq", kaiming_uniform(dm, dm, dm, rng));
        p.add(prefix + "attn.wk", kaiming_uniform(d_in, dm, d_in, rng));
        p.add(prefix + "attn.wv", kaiming_uniform(d_in, dm, d_in, rng));
        p.add(prefix + "attn.wo", kaiming_uniform(dm, dm, dm, rng));
        p.add(prefix + "ln1.scale", Matrix::full(1, dm, 1.0));
        p.add(prefix + "ln1.offset", Matrix::zeros(1, dm));
        p.add(prefix + "ffn.w1", kaiming_uniform(dm, dff, dm, rng));
        p.add(prefix + "ffn.b1", Matrix::zeros(1, dff));
        p.add(prefix + "ffn.w2", kaiming_uniform(dff, dm, dff, rng));
        p.add(prefix + "ffn.b2", Matrix::zeros(1, dm));
        p.add(prefix + "ln2.scale", Matrix::full(1, dm, 1.0));
        p.add(prefix + "ln2.offset", Matrix::zeros(1, dm));
    }
    p.add("group_fc.weight", kaiming_uniform(cfg.group_factor, dm, dm, rng));
    p.add("group_fc.bias", Matrix::zeros(1, cfg.group_factor));
    return p;
}

Matrix cross_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                       std::size_t d_k) {
    if (q.cols() != d_k || k.cols() != d_k) {
        throw DimensionError("cross_attention: query/key width " + q.shape_str() +
                             ", " + k.shape_str() + " must equal d_k=" +
                             std::to_string(d_k));
    }
    if (v.rows() != k.rows()) {
        throw DimensionError("cross_attention: keys " + k.shape_str() +
                             " and values " + v.shape_str() + " disagree on rows");
    }
    Matrix scores =
        scale(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(d_k)));
    return matmul(softmax_rows(scores), v);
}

DecoderGraph::DecoderGraph(Tape& tape, const ParamSet& params,
                           const DecoderConfig& cfg, bool trainable)
    : tape_(tape), cfg_(cfg) {
    cfg_.validate();
    for (const auto& e : params) {
        NodeId id = trainable ? tape_.parameter(e.name, e.value)
                              : tape_.constant(e.value);
        nodes_.emplace_back(e.name, id);
    }
}

NodeId DecoderGraph::param(const std::string& name) {
    for (const auto& [n, id] : nodes_) {
        if (n == name) return id;
    }
    throw ArgumentError("decoder graph: missing parameter '" + name + "'");
}

NodeId DecoderGraph::project_queries(NodeId text_embeddings,
                                     std::size_t class_count) {
    NodeId projected = tape_.matmul(text_embeddings, param("query_proj"));
    if (cfg_.group_factor == 1) return projected;
    NodeId pool =
        tape_.constant(group_pool_matrix(class_count, cfg_.group_factor));
    return tape_.matmul(pool, projected);
}

NodeId DecoderGraph::forward(NodeId queries, NodeId image_tokens) {
    const std::size_t dk = cfg_.d_k();
    NodeId x = queries;
    for (std::size_t l = 0; l < cfg_.n_layers; ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        NodeId q = tape_.matmul(x, param(prefix + "attn.wq"));
        NodeId k = tape_.matmul(image_tokens, param(prefix + "attn.wk"));
        NodeId v = tape_.matmul(image_tokens, param(prefix + "attn.wv"));

        std::vector<NodeId> heads;
        heads.reserve(cfg_.n_heads);
        for (std::size_t h = 0; h < cfg_.n_heads; ++h) {
            NodeId qh = tape_.slice_cols(q, h * dk, dk);
            NodeId kh = tape_.slice_cols(k, h * dk, dk);
            NodeId vh = tape_.slice_cols(v, h * dk, dk);
            NodeId logits = tape_.scale(tape_.matmul(qh, tape_.transpose(kh)),
                                        1.0 / std::sqrt(static_cast<double>(dk)));
            heads.push_back(tape_.matmul(tape_.softmax_rows(logits), vh));
        }
        NodeId attn = tape_.matmul(tape_.concat_cols(heads), param(prefix + "attn.wo"));
        x = tape_.layer_norm_rows(tape_.add(x, attn), param(prefix + "ln1.scale"),
                                  param(prefix + "ln1.offset"), cfg_.ln_eps);

        NodeId hidden = tape_.relu(tape_.add_row_vector(
            tape_.matmul(x, param(prefix + "ffn.w1")), param(prefix + "ffn.b1")));
        NodeId ffn = tape_.add_row_vector(tape_.matmul(hidden, param(prefix + "ffn.w2")),
                                          param(prefix + "ffn.b2"));
        x = tape_.layer_norm_rows(tape_.add(x, ffn), param(prefix + "ln2.scale"),
                                  param(prefix + "ln2.offset"), cfg_.ln_eps);
    }
    return x;
}

NodeId DecoderGraph::logits(NodeId decoded, std::size_t class_count) {
    const std::size_t tokens = tape_.value(decoded).rows();
    if (tokens != cfg_.token_count_for(class_count)) {
        throw DimensionError("group_fc: " + std::to_string(tokens) +
                             " decoded tokens for " + std::to_string(class_count) +
                             " classes with g=" + std::to_string(cfg_.group_factor));
    }
    // logit for class c = W[c mod g] . token[c / g] + bias[c mod g]; the
    // row-major flattening of (tokens x g) realizes exactly that indexing.
    NodeId per_group = tape_.add_row_vector(
        tape_.matmul(decoded, tape_.transpose(param("group_fc.weight"))),
        param("group_fc.bias"));
    NodeId flat = tape_.reshape(per_group, tokens * cfg_.group_factor, 1);
    if (tokens * cfg_.group_factor == class_count) return flat;
    return tape_.slice_rows(flat, 0, class_count);
}

QueryBank build_query_bank(const Matrix& text_embeddings,
                           const std::vector<std::uint32_t>& class_ids,
                           const ParamSet& params, const DecoderConfig& cfg) {
    if (text_embeddings.rows() != class_ids.size()) {
        throw DimensionError("query bank: " + std::to_string(class_ids.size()) +
                             " class ids for " + text_embeddings.shape_str() +
                             " embeddings");
    }
    if (class_ids.empty()) {
        throw ArgumentError("query bank: empty class set");
    }
    Tape tape;
    DecoderGraph graph(tape, params, cfg, /*trainable=*/false);
    NodeId queries =
        graph.project_queries(tape.constant(text_embeddings), class_ids.size());
    return QueryBank{tape.value(queries), class_ids};
}

Matrix decoder_forward(const Matrix& image_tokens, const QueryBank& bank,
                       const ParamSet& params, const DecoderConfig& cfg) {
    if (bank.queries.empty()) {
        throw ArgumentError("decoder_forward: empty query bank");
    }
    Tape tape;
    DecoderGraph graph(tape, params, cfg, /*trainable=*/false);
    NodeId out =
        graph.forward(tape.constant(bank.queries), tape.constant(image_tokens));
    return tape.value(out);
}

Matrix group_fc(const Matrix& decoded, const ParamSet& params,
                const DecoderConfig& cfg, std::size_t class_count) {
    Tape tape;
    DecoderGraph graph(tape, params, cfg, /*trainable=*/false);
    return tape.value(graph.logits(tape.constant(decoded), class_count));
}

Matrix predict(const SampleRecord& record, const QueryBank& bank,
               const ParamSet& params, const DecoderConfig& cfg) {
    Tape tape;
    DecoderGraph graph(tape, params, cfg, /*trainable=*/false);
    NodeId decoded =
        graph.forward(tape.constant(bank.queries), tape.constant(record.tokens));
    NodeId logits = graph.logits(decoded, bank.class_ids.size());
    return sigmoid(tape.value(logits));
}

}  // namespace cdec
