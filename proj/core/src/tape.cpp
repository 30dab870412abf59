#include "cdec/tape.hpp"

#include <atomic>
#include <cmath>
#include <utility>

#include "cdec/errors.hpp"

namespace cdec {

namespace {

std::atomic<std::uint64_t> g_next_tape_id{1};

void accumulate(Matrix& grad, const Matrix& delta) {
    if (grad.empty()) {
        grad = delta;
        return;
    }
    for (std::size_t i = 0; i < grad.size(); ++i) {
        grad.data()[i] += delta.data()[i];
    }
}

double stable_sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                    : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

Tape::Tape() : tape_id_(g_next_tape_id.fetch_add(1)) {}

std::uint32_t Tape::check(NodeId id) const {
    if (id.tape != tape_id_ || id.index >= nodes_.size()) {
        throw LineageError("tape: node was not produced by this tape");
    }
    return id.index;
}

NodeId Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return NodeId{tape_id_, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

NodeId Tape::constant(Matrix m) {
    return push({Op::kConstant, {}, std::move(m), 0.0, {}, 0});
}

NodeId Tape::parameter(const std::string& name, Matrix m) {
    for (const auto& [existing, _] : params_) {
        if (existing == name) {
            throw ArgumentError("tape: duplicate parameter '" + name + "'");
        }
    }
    NodeId id = push({Op::kParameter, {}, std::move(m), 0.0, {}, 0});
    params_.emplace_back(name, id.index);
    return id;
}

NodeId Tape::matmul(NodeId a, NodeId b) {
    std::uint32_t ia = check(a), ib = check(b);
    return push({Op::kMatmul, {ia, ib},
                 cdec::matmul(nodes_[ia].value, nodes_[ib].value), 0.0, {}, 0});
}

NodeId Tape::transpose(NodeId a) {
    std::uint32_t ia = check(a);
    return push({Op::kTranspose, {ia}, cdec::transpose(nodes_[ia].value), 0.0, {}, 0});
}

NodeId Tape::add(NodeId a, NodeId b) {
    std::uint32_t ia = check(a), ib = check(b);
    return push({Op::kAdd, {ia, ib}, cdec::add(nodes_[ia].value, nodes_[ib].value),
                 0.0, {}, 0});
}

NodeId Tape::sub(NodeId a, NodeId b) {
    std::uint32_t ia = check(a), ib = check(b);
    return push({Op::kSub, {ia, ib}, cdec::sub(nodes_[ia].value, nodes_[ib].value),
                 0.0, {}, 0});
}

NodeId Tape::hadamard(NodeId a, NodeId b) {
    std::uint32_t ia = check(a), ib = check(b);
    return push({Op::kHadamard, {ia, ib},
                 cdec::hadamard(nodes_[ia].value, nodes_[ib].value), 0.0, {}, 0});
}

NodeId Tape::scale(NodeId a, double s) {
    std::uint32_t ia = check(a);
    return push({Op::kScale, {ia}, cdec::scale(nodes_[ia].value, s), s, {}, 0});
}

NodeId Tape::add_row_vector(NodeId a, NodeId bias) {
    std::uint32_t ia = check(a), ib = check(bias);
    return push({Op::kAddRowVector, {ia, ib},
                 cdec::add_row_vector(nodes_[ia].value, nodes_[ib].value), 0.0, {}, 0});
}

NodeId Tape::relu(NodeId a) {
    std::uint32_t ia = check(a);
    return push({Op::kRelu, {ia}, cdec::relu(nodes_[ia].value), 0.0, {}, 0});
}

NodeId Tape::softmax_rows(NodeId a) {
    std::uint32_t ia = check(a);
    return push({Op::kSoftmaxRows, {ia}, cdec::softmax_rows(nodes_[ia].value), 0.0, {}, 0});
}

NodeId Tape::log_softmax_rows(NodeId a) {
    std::uint32_t ia = check(a);
    return push({Op::kLogSoftmaxRows, {ia}, cdec::log_softmax_rows(nodes_[ia].value),
                 0.0, {}, 0});
}

NodeId Tape::l2_normalize_rows(NodeId a, double eps) {
    std::uint32_t ia = check(a);
    return push({Op::kL2NormalizeRows, {ia},
                 cdec::l2_normalize_rows(nodes_[ia].value, eps), eps, {}, 0});
}

NodeId Tape::layer_norm_rows(NodeId a, NodeId gamma, NodeId beta, double eps) {
    std::uint32_t ia = check(a), ig = check(gamma), ib = check(beta);
    return push({Op::kLayerNormRows, {ia, ig, ib},
                 cdec::layer_norm_rows(nodes_[ia].value, nodes_[ig].value,
                                       nodes_[ib].value, eps),
                 eps, {}, 0});
}

NodeId Tape::mean_rows(NodeId a) {
    std::uint32_t ia = check(a);
    return push({Op::kMeanRows, {ia}, cdec::mean_rows(nodes_[ia].value), 0.0, {}, 0});
}

NodeId Tape::sum(NodeId a) {
    std::uint32_t ia = check(a);
    return push({Op::kSum, {ia}, Matrix{{cdec::sum(nodes_[ia].value)}}, 0.0, {}, 0});
}

NodeId Tape::mean(NodeId a) {
    std::uint32_t ia = check(a);
    return push({Op::kMean, {ia}, Matrix{{cdec::mean(nodes_[ia].value)}}, 0.0, {}, 0});
}

NodeId Tape::slice_rows(NodeId a, std::size_t r0, std::size_t count) {
    std::uint32_t ia = check(a);
    return push({Op::kSliceRows, {ia}, cdec::slice_rows(nodes_[ia].value, r0, count),
                 0.0, {}, r0});
}

NodeId Tape::slice_cols(NodeId a, std::size_t c0, std::size_t count) {
    std::uint32_t ia = check(a);
    return push({Op::kSliceCols, {ia}, cdec::slice_cols(nodes_[ia].value, c0, count),
                 0.0, {}, c0});
}

NodeId Tape::concat_rows(const std::vector<NodeId>& parts) {
    std::vector<std::uint32_t> idx;
    std::vector<Matrix> values;
    idx.reserve(parts.size());
    values.reserve(parts.size());
    for (NodeId p : parts) {
        idx.push_back(check(p));
        values.push_back(nodes_[idx.back()].value);
    }
    return push({Op::kConcatRows, std::move(idx), cdec::concat_rows(values), 0.0, {}, 0});
}

NodeId Tape::concat_cols(const std::vector<NodeId>& parts) {
    std::vector<std::uint32_t> idx;
    std::vector<Matrix> values;
    idx.reserve(parts.size());
    values.reserve(parts.size());
    for (NodeId p : parts) {
        idx.push_back(check(p));
        values.push_back(nodes_[idx.back()].value);
    }
    return push({Op::kConcatCols, std::move(idx), cdec::concat_cols(values), 0.0, {}, 0});
}

NodeId Tape::reshape(NodeId a, std::size_t rows, std::size_t cols) {
    std::uint32_t ia = check(a);
    return push({Op::kReshape, {ia}, cdec::reshape(nodes_[ia].value, rows, cols),
                 0.0, {}, 0});
}

NodeId Tape::bce_with_logits_mean(NodeId logits, const Matrix& targets) {
    std::uint32_t il = check(logits);
    const Matrix& x = nodes_[il].value;
    if (!x.same_shape(targets)) {
        throw DimensionError("bce_with_logits_mean: logits " + x.shape_str() +
                             " vs targets " + targets.shape_str());
    }
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double xi = x.data()[i];
        double yi = targets.data()[i];
        if (yi != 0.0 && yi != 1.0) {
            throw ArgumentError("bce_with_logits_mean: targets must be 0/1");
        }
        total += std::max(xi, 0.0) - xi * yi + std::log1p(std::exp(-std::abs(xi)));
    }
    Matrix out{{total / static_cast<double>(x.size())}};
    return push({Op::kBceWithLogitsMean, {il}, std::move(out), 0.0, targets, 0});
}

const Matrix& Tape::value(NodeId id) const { return nodes_[check(id)].value; }

double Tape::scalar_value(NodeId id) const {
    const Matrix& v = value(id);
    if (v.size() != 1) {
        throw ArgumentError("tape: node value " + v.shape_str() + " is not scalar");
    }
    return v.data()[0];
}

ParamSet Tape::backward(NodeId scalar_output) const {
    std::uint32_t out = check(scalar_output);
    if (nodes_[out].value.size() != 1) {
        throw ArgumentError("backward: output must be 1x1, got " +
                            nodes_[out].value.shape_str());
    }

    std::vector<Matrix> grads(nodes_.size());
    grads[out] = Matrix{{1.0}};

    for (std::uint32_t i = out + 1; i-- > 0;) {
        const Node& node = nodes_[i];
        const Matrix& g = grads[i];
        if (g.empty()) continue;

        switch (node.op) {
            case Op::kConstant:
            case Op::kParameter:
                break;
            case Op::kMatmul: {
                const Matrix& va = nodes_[node.inputs[0]].value;
                const Matrix& vb = nodes_[node.inputs[1]].value;
                accumulate(grads[node.inputs[0]], cdec::matmul(g, cdec::transpose(vb)));
                accumulate(grads[node.inputs[1]], cdec::matmul(cdec::transpose(va), g));
                break;
            }
            case Op::kTranspose:
                accumulate(grads[node.inputs[0]], cdec::transpose(g));
                break;
            case Op::kAdd:
                accumulate(grads[node.inputs[0]], g);
                accumulate(grads[node.inputs[1]], g);
                break;
            case Op::kSub:
                accumulate(grads[node.inputs[0]], g);
                accumulate(grads[node.inputs[1]], cdec::scale(g, -1.0));
                break;
            case Op::kHadamard: {
                const Matrix& va = nodes_[node.inputs[0]].value;
                const Matrix& vb = nodes_[node.inputs[1]].value;
                accumulate(grads[node.inputs[0]], cdec::hadamard(g, vb));
                accumulate(grads[node.inputs[1]], cdec::hadamard(g, va));
                break;
            }
            case Op::kScale:
                accumulate(grads[node.inputs[0]], cdec::scale(g, node.number));
                break;
            case Op::kAddRowVector: {
                accumulate(grads[node.inputs[0]], g);
                Matrix db(1, g.cols());
                for (std::size_t c = 0; c < g.cols(); ++c) {
                    double s = 0.0;
                    for (std::size_t r = 0; r < g.rows(); ++r) s += g.at(r, c);
                    db.at(0, c) = s;
                }
                accumulate(grads[node.inputs[1]], db);
                break;
            }
            case Op::kRelu: {
                const Matrix& va = nodes_[node.inputs[0]].value;
                Matrix d(g.rows(), g.cols());
                for (std::size_t k = 0; k < g.size(); ++k) {
                    d.data()[k] = va.data()[k] > 0.0 ? g.data()[k] : 0.0;
                }
                accumulate(grads[node.inputs[0]], d);
                break;
            }
            case Op::kSoftmaxRows: {
                const Matrix& y = node.value;
                Matrix d(g.rows(), g.cols());
                for (std::size_t r = 0; r < g.rows(); ++r) {
                    double dot = 0.0;
                    for (std::size_t c = 0; c < g.cols(); ++c) {
                        dot += g.at(r, c) * y.at(r, c);
                    }
                    for (std::size_t c = 0; c < g.cols(); ++c) {
                        d.at(r, c) = y.at(r, c) * (g.at(r, c) - dot);
                    }
                }
                accumulate(grads[node.inputs[0]], d);
                break;
            }
            case Op::kLogSoftmaxRows: {
                // exp(value) is the softmax of the input
                const Matrix& ls = node.value;
                Matrix d(g.rows(), g.cols());
                for (std::size_t r = 0; r < g.rows(); ++r) {
                    double gsum = 0.0;
                    for (std::size_t c = 0; c < g.cols(); ++c) gsum += g.at(r, c);
                    for (std::size_t c = 0; c < g.cols(); ++c) {
                        d.at(r, c) = g.at(r, c) - std::exp(ls.at(r, c)) * gsum;
                    }
                }
                accumulate(grads[node.inputs[0]], d);
                break;
            }
            case Op::kL2NormalizeRows: {
                const Matrix& x = nodes_[node.inputs[0]].value;
                const Matrix& y = node.value;
                Matrix d(g.rows(), g.cols());
                for (std::size_t r = 0; r < g.rows(); ++r) {
                    double sq = 0.0;
                    for (std::size_t c = 0; c < g.cols(); ++c) {
                        sq += x.at(r, c) * x.at(r, c);
                    }
                    double norm = std::sqrt(sq);
                    if (norm < node.number) {  // passthrough row
                        for (std::size_t c = 0; c < g.cols(); ++c) d.at(r, c) = g.at(r, c);
                        continue;
                    }
                    double dot = 0.0;
                    for (std::size_t c = 0; c < g.cols(); ++c) {
                        dot += g.at(r, c) * y.at(r, c);
                    }
                    for (std::size_t c = 0; c < g.cols(); ++c) {
                        d.at(r, c) = (g.at(r, c) - y.at(r, c) * dot) / norm;
                    }
                }
                accumulate(grads[node.inputs[0]], d);
                break;
            }
            case Op::kLayerNormRows: {
                const Matrix& x = nodes_[node.inputs[0]].value;
                const Matrix& gamma = nodes_[node.inputs[1]].value;
                const double cols = static_cast<double>(x.cols());
                Matrix dx(x.rows(), x.cols());
                Matrix dgamma(1, x.cols());
                Matrix dbeta(1, x.cols());
                for (std::size_t r = 0; r < x.rows(); ++r) {
                    double mu = 0.0;
                    for (std::size_t c = 0; c < x.cols(); ++c) mu += x.at(r, c);
                    mu /= cols;
                    double var = 0.0;
                    for (std::size_t c = 0; c < x.cols(); ++c) {
                        double dv = x.at(r, c) - mu;
                        var += dv * dv;
                    }
                    var /= cols;
                    double inv = 1.0 / std::sqrt(var + node.number);
                    double mean_h = 0.0, mean_hx = 0.0;
                    for (std::size_t c = 0; c < x.cols(); ++c) {
                        double xhat = (x.at(r, c) - mu) * inv;
                        double h = g.at(r, c) * gamma.at(0, c);
                        mean_h += h;
                        mean_hx += h * xhat;
                        dgamma.at(0, c) += g.at(r, c) * xhat;
                        dbeta.at(0, c) += g.at(r, c);
                    }
                    mean_h /= cols;
                    mean_hx /= cols;
                    for (std::size_t c = 0; c < x.cols(); ++c) {
                        double xhat = (x.at(r, c) - mu) * inv;
                        double h = g.at(r, c) * gamma.at(0, c);
                        dx.at(r, c) = (h - mean_h - xhat * mean_hx) * inv;
                    }
                }
                accumulate(grads[node.inputs[0]], dx);
                accumulate(grads[node.inputs[1]], dgamma);
                accumulate(grads[node.inputs[2]], dbeta);
                break;
            }
            case Op::kMeanRows: {
                const Matrix& x = nodes_[node.inputs[0]].value;
                double inv = 1.0 / static_cast<double>(x.rows());
                Matrix d(x.rows(), x.cols());
                for (std::size_t r = 0; r < x.rows(); ++r) {
                    for (std::size_t c = 0; c < x.cols(); ++c) {
                        d.at(r, c) = g.at(0, c) * inv;
                    }
                }
                accumulate(grads[node.inputs[0]], d);
                break;
            }
            case Op::kSum: {
                const Matrix& x = nodes_[node.inputs[0]].value;
                accumulate(grads[node.inputs[0]],
                           Matrix::full(x.rows(), x.cols(), g.data()[0]));
                break;
            }
            case Op::kMean: {
                const Matrix& x = nodes_[node.inputs[0]].value;
                accumulate(grads[node.inputs[0]],
                           Matrix::full(x.rows(), x.cols(),
                                        g.data()[0] / static_cast<double>(x.size())));
                break;
            }
            case Op::kSliceRows: {
                const Matrix& x = nodes_[node.inputs[0]].value;
                Matrix d(x.rows(), x.cols());
                for (std::size_t r = 0; r < g.rows(); ++r) {
                    for (std::size_t c = 0; c < g.cols(); ++c) {
                        d.at(node.offset + r, c) = g.at(r, c);
                    }
                }
                accumulate(grads[node.inputs[0]], d);
                break;
            }
            case Op::kSliceCols: {
                const Matrix& x = nodes_[node.inputs[0]].value;
                Matrix d(x.rows(), x.cols());
                for (std::size_t r = 0; r < g.rows(); ++r) {
                    for (std::size_t c = 0; c < g.cols(); ++c) {
                        d.at(r, node.offset + c) = g.at(r, c);
                    }
                }
                accumulate(grads[node.inputs[0]], d);
                break;
            }
            case Op::kConcatRows: {
                std::size_t r0 = 0;
                for (std::uint32_t input : node.inputs) {
                    const Matrix& part = nodes_[input].value;
                    accumulate(grads[input], cdec::slice_rows(g, r0, part.rows()));
                    r0 += part.rows();
                }
                break;
            }
            case Op::kConcatCols: {
                std::size_t c0 = 0;
                for (std::uint32_t input : node.inputs) {
                    const Matrix& part = nodes_[input].value;
                    accumulate(grads[input], cdec::slice_cols(g, c0, part.cols()));
                    c0 += part.cols();
                }
                break;
            }
            case Op::kReshape: {
                const Matrix& x = nodes_[node.inputs[0]].value;
                accumulate(grads[node.inputs[0]], cdec::reshape(g, x.rows(), x.cols()));
                break;
            }
            case Op::kBceWithLogitsMean: {
                const Matrix& x = nodes_[node.inputs[0]].value;
                const Matrix& y = node.aux;
                double s = g.data()[0] / static_cast<double>(x.size());
                Matrix d(x.rows(), x.cols());
                for (std::size_t k = 0; k < x.size(); ++k) {
                    d.data()[k] = s * (stable_sigmoid(x.data()[k]) - y.data()[k]);
                }
                accumulate(grads[node.inputs[0]], d);
                break;
            }
        }
    }

    ParamSet out_grads;
    for (const auto& [name, index] : params_) {
        if (grads[index].empty()) {
            const Matrix& p = nodes_[index].value;
            out_grads.add(name, Matrix::zeros(p.rows(), p.cols()));
        } else {
            out_grads.add(name, std::move(grads[index]));
        }
    }
    return out_grads;
}

}  // namespace cdec
