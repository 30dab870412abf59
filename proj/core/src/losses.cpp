#include "cdec/losses.hpp"

#include <cmath>

#include "cdec/errors.hpp"

namespace cdec {

namespace {

constexpr double kNormEps = 1e-12;

void check_pair(const char* op, const Matrix& a, const Matrix& b) {
    if (a.rows() == 0) {
        throw ArgumentError(std::string(op) + ": empty batch");
    }
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(op) + ": image side " + a.shape_str() +
                             " vs text side " + b.shape_str());
    }
}

}  // namespace

void LossWeights::validate() const {
    if (alpha < 0.0 || beta < 0.0) {
        throw ConfigError("loss weights: alpha and beta must be >= 0");
    }
    if (alpha == 0.0 && beta == 0.0) {
        throw ConfigError("loss weights: alpha and beta cannot both be zero");
    }
    if (!(tau > 0.0)) {
        throw ConfigError("loss weights: tau must be > 0");
    }
}

double classification_loss(const Matrix& logits, const Matrix& targets) {
    if (!logits.same_shape(targets)) {
        throw DimensionError("classification_loss: logits " + logits.shape_str() +
                             " vs targets " + targets.shape_str());
    }
    if (logits.empty()) {
        throw ArgumentError("classification_loss: empty input");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        double x = logits.data()[i];
        double y = targets.data()[i];
        if (y != 0.0 && y != 1.0) {
            throw ArgumentError("classification_loss: targets must be 0/1");
        }
        total += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
    }
    return total / static_cast<double>(logits.size());
}

double clip_alignment_loss(const Matrix& image_embeddings,
                           const Matrix& text_embeddings, double tau) {
    check_pair("clip_alignment_loss", image_embeddings, text_embeddings);
    if (!(tau > 0.0)) {
        throw ConfigError("clip_alignment_loss: tau must be > 0");
    }
    const std::size_t b = image_embeddings.rows();
    Matrix sim = scale(matmul(l2_normalize_rows(image_embeddings, kNormEps),
                              transpose(l2_normalize_rows(text_embeddings, kNormEps))),
                       1.0 / tau);
    Matrix rowwise = log_softmax_rows(sim);
    Matrix colwise = log_softmax_rows(transpose(sim));
    double total = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        total -= rowwise.at(i, i) + colwise.at(i, i);
    }
    return 0.5 * total / static_cast<double>(b);
}

double clip_alignment_loss_cosine(const Matrix& image_embeddings,
                                  const Matrix& text_embeddings) {
    check_pair("clip_alignment_loss", image_embeddings, text_embeddings);
    Matrix img = l2_normalize_rows(image_embeddings, kNormEps);
    Matrix txt = l2_normalize_rows(text_embeddings, kNormEps);
    double total = 0.0;
    for (std::size_t r = 0; r < img.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < img.cols(); ++c) {
            dot += img.at(r, c) * txt.at(r, c);
        }
        total += 1.0 - dot;
    }
    return total / static_cast<double>(img.rows());
}

LossReport combined_loss(double clip, double classification,
                         const LossWeights& weights) {
    weights.validate();
    LossReport report;
    report.clip = clip;
    report.classification = classification;
    report.total = weights.alpha * clip + weights.beta * classification;
    return report;
}

NodeId classification_loss_node(Tape& tape, NodeId logits, const Matrix& targets) {
    return tape.bce_with_logits_mean(logits, targets);
}

NodeId clip_alignment_loss_node(Tape& tape, NodeId image_embeddings,
                                NodeId text_embeddings, double tau) {
    if (!(tau > 0.0)) {
        throw ConfigError("clip_alignment_loss: tau must be > 0");
    }
    const Matrix& img = tape.value(image_embeddings);
    check_pair("clip_alignment_loss", img, tape.value(text_embeddings));
    const auto b = img.rows();

    NodeId sim = tape.scale(
        tape.matmul(tape.l2_normalize_rows(image_embeddings, kNormEps),
                    tape.transpose(tape.l2_normalize_rows(text_embeddings, kNormEps))),
        1.0 / tau);
    NodeId diag = tape.constant(Matrix::identity(b));
    NodeId row_term =
        tape.sum(tape.hadamard(tape.log_softmax_rows(sim), diag));
    NodeId col_term =
        tape.sum(tape.hadamard(tape.log_softmax_rows(tape.transpose(sim)), diag));
    return tape.scale(tape.add(row_term, col_term),
                      -0.5 / static_cast<double>(b));
}

NodeId clip_alignment_cosine_node(Tape& tape, NodeId image_embeddings,
                                  NodeId text_embeddings) {
    const Matrix& img = tape.value(image_embeddings);
    check_pair("clip_alignment_loss", img, tape.value(text_embeddings));
    NodeId prod = tape.hadamard(tape.l2_normalize_rows(image_embeddings, kNormEps),
                                tape.l2_normalize_rows(text_embeddings, kNormEps));
    NodeId cos = tape.matmul(prod, tape.constant(Matrix::full(img.cols(), 1, 1.0)));
    NodeId ones = tape.constant(Matrix::full(img.rows(), 1, 1.0));
    return tape.mean(tape.sub(ones, cos));
}

}  // namespace cdec
