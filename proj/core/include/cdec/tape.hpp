#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdec/matrix.hpp"
#include "cdec/params.hpp"

namespace cdec {

// Handle to a value recorded on a specific tape. Using a node with another
// tape raises LineageError.
struct NodeId {
    std::uint64_t tape = 0;
    std::uint32_t index = 0;
};

// Reverse-mode gradient tape over a fixed op vocabulary. Record a forward
// computation, then backward() visits the ops in exact reverse order and
// returns one gradient per registered parameter (zero-filled when a
// parameter does not reach the output). A tape is confined to one thread.
class Tape {
public:
    Tape();

    NodeId constant(Matrix m);
    NodeId parameter(const std::string& name, Matrix m);

    NodeId matmul(NodeId a, NodeId b);
    NodeId transpose(NodeId a);
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId hadamard(NodeId a, NodeId b);
    NodeId scale(NodeId a, double s);
    NodeId add_row_vector(NodeId a, NodeId bias);
    NodeId relu(NodeId a);
    NodeId softmax_rows(NodeId a);
    NodeId log_softmax_rows(NodeId a);
    NodeId l2_normalize_rows(NodeId a, double eps);
    NodeId layer_norm_rows(NodeId a, NodeId gamma, NodeId beta, double eps);
    NodeId mean_rows(NodeId a);
    NodeId sum(NodeId a);   // 1x1
    NodeId mean(NodeId a);  // 1x1
    NodeId slice_rows(NodeId a, std::size_t r0, std::size_t count);
    NodeId slice_cols(NodeId a, std::size_t c0, std::size_t count);
    NodeId concat_rows(const std::vector<NodeId>& parts);
    NodeId concat_cols(const std::vector<NodeId>& parts);
    NodeId reshape(NodeId a, std::size_t rows, std::size_t cols);

    // Mean binary cross-entropy over all entries, sigmoid folded in
    // (logit formulation). targets must be 0/1 of the logits' shape.
    NodeId bce_with_logits_mean(NodeId logits, const Matrix& targets);

    const Matrix& value(NodeId id) const;
    double scalar_value(NodeId id) const;

    // Gradients of a 1x1 output w.r.t. every registered parameter,
    // in parameter registration order.
    ParamSet backward(NodeId scalar_output) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    enum class Op {
        kConstant,
        kParameter,
        kMatmul,
        kTranspose,
        kAdd,
        kSub,
        kHadamard,
        kScale,
        kAddRowVector,
        kRelu,
        kSoftmaxRows,
        kLogSoftmaxRows,
        kL2NormalizeRows,
        kLayerNormRows,
        kMeanRows,
        kSum,
        kMean,
        kSliceRows,
        kSliceCols,
        kConcatRows,
        kConcatCols,
        kReshape,
        kBceWithLogitsMean,
    };

    struct Node {
        Op op;
        std::vector<std::uint32_t> inputs;
        Matrix value;
        double number = 0.0;  // scale factor or eps
        Matrix aux;           // bce targets
        std::size_t offset = 0;
    };

    std::uint32_t check(NodeId id) const;
    NodeId push(Node node);

    std::uint64_t tape_id_;
    std::vector<Node> nodes_;
    std::vector<std::pair<std::string, std::uint32_t>> params_;
};

}  // namespace cdec
