#include "cdec/matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdec/errors.hpp"

namespace cdec {

namespace {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMajor>;
using MutMap = Eigen::Map<EigenRowMajor>;

ConstMap map_of(const Matrix& m) {
    return ConstMap(m.data(), static_cast<Eigen::Index>(m.rows()),
                    static_cast<Eigen::Index>(m.cols()));
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
    throw DimensionError(std::string(op) + ": incompatible shapes " +
                         a.shape_str() + " and " + b.shape_str());
}

void require_nonempty(const char* op, const Matrix& m) {
    if (m.empty()) {
        throw DimensionError(std::string(op) + ": empty matrix " + m.shape_str());
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_str());
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw DimensionError("Matrix: ragged initializer list");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) {
    return Matrix(rows, cols);
}

Matrix Matrix::full(std::size_t rows, std::size_t cols, double value) {
    Matrix m(rows, cols);
    std::fill(m.data_.begin(), m.data_.end(), value);
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

std::string Matrix::shape_str() const {
    return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

void Matrix::require_finite(const char* where) const {
    for (double v : data_) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string(where) + ": non-finite entry in " +
                               shape_str() + " result");
        }
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) shape_error("matmul", a, b);
    require_nonempty("matmul", a);
    require_nonempty("matmul", b);
    Matrix out(a.rows(), b.cols());
    MutMap(out.data(), static_cast<Eigen::Index>(out.rows()),
           static_cast<Eigen::Index>(out.cols()))
        .noalias() = map_of(a) * map_of(b);
    out.require_finite("matmul");
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out.at(c, r) = m.at(r, c);
        }
    }
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) shape_error("add", a, b);
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = a.data()[i] + b.data()[i];
    }
    out.require_finite("add");
    return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) shape_error("sub", a, b);
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = a.data()[i] - b.data()[i];
    }
    out.require_finite("sub");
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) shape_error("hadamard", a, b);
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = a.data()[i] * b.data()[i];
    }
    out.require_finite("hadamard");
    return out;
}

Matrix scale(const Matrix& m, double s) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = m.data()[i] * s;
    out.require_finite("scale");
    return out;
}

Matrix add_row_vector(const Matrix& m, const Matrix& bias) {
    if (bias.rows() != 1 || bias.cols() != m.cols()) {
        shape_error("add_row_vector", m, bias);
    }
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out.at(r, c) = m.at(r, c) + bias.at(0, c);
        }
    }
    out.require_finite("add_row_vector");
    return out;
}

Matrix relu(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = m.data()[i] > 0.0 ? m.data()[i] : 0.0;
    }
    return out;
}

Matrix sigmoid(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double x = m.data()[i];
        // split on sign to avoid exp overflow
        out.data()[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                 : std::exp(x) / (1.0 + std::exp(x));
    }
    out.require_finite("sigmoid");
    return out;
}

Matrix softmax_rows(const Matrix& m) {
    require_nonempty("softmax_rows", m);
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double mx = m.at(r, 0);
        for (std::size_t c = 1; c < m.cols(); ++c) mx = std::max(mx, m.at(r, c));
        double denom = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out.at(r, c) = std::exp(m.at(r, c) - mx);
            denom += out.at(r, c);
        }
        for (std::size_t c = 0; c < m.cols(); ++c) out.at(r, c) /= denom;
    }
    out.require_finite("softmax_rows");
    return out;
}

Matrix log_softmax_rows(const Matrix& m) {
    require_nonempty("log_softmax_rows", m);
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double mx = m.at(r, 0);
        for (std::size_t c = 1; c < m.cols(); ++c) mx = std::max(mx, m.at(r, c));
        double denom = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            denom += std::exp(m.at(r, c) - mx);
        }
        double lse = mx + std::log(denom);
        for (std::size_t c = 0; c < m.cols(); ++c) out.at(r, c) = m.at(r, c) - lse;
    }
    out.require_finite("log_softmax_rows");
    return out;
}

Matrix l2_normalize_rows(const Matrix& m, double eps) {
    if (eps <= 0.0) throw ArgumentError("l2_normalize_rows: eps must be > 0");
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double sq = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) sq += m.at(r, c) * m.at(r, c);
        double norm = std::sqrt(sq);
        double inv = norm < eps ? 1.0 : 1.0 / norm;
        for (std::size_t c = 0; c < m.cols(); ++c) out.at(r, c) = m.at(r, c) * inv;
    }
    out.require_finite("l2_normalize_rows");
    return out;
}

Matrix layer_norm_rows(const Matrix& m, const Matrix& gamma, const Matrix& beta,
                       double eps) {
    if (gamma.rows() != 1 || gamma.cols() != m.cols()) {
        shape_error("layer_norm_rows", m, gamma);
    }
    if (beta.rows() != 1 || beta.cols() != m.cols()) {
        shape_error("layer_norm_rows", m, beta);
    }
    require_nonempty("layer_norm_rows", m);
    Matrix out(m.rows(), m.cols());
    const double d = static_cast<double>(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double mu = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) mu += m.at(r, c);
        mu /= d;
        double var = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            double dv = m.at(r, c) - mu;
            var += dv * dv;
        }
        var /= d;
        double inv = 1.0 / std::sqrt(var + eps);
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out.at(r, c) = gamma.at(0, c) * (m.at(r, c) - mu) * inv + beta.at(0, c);
        }
    }
    out.require_finite("layer_norm_rows");
    return out;
}

Matrix mean_rows(const Matrix& m) {
    require_nonempty("mean_rows", m);
    Matrix out(1, m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) s += m.at(r, c);
        out.at(0, c) = s / static_cast<double>(m.rows());
    }
    out.require_finite("mean_rows");
    return out;
}

double sum(const Matrix& m) {
    return std::accumulate(m.values().begin(), m.values().end(), 0.0);
}

double mean(const Matrix& m) {
    require_nonempty("mean", m);
    return sum(m) / static_cast<double>(m.size());
}

Matrix slice_rows(const Matrix& m, std::size_t r0, std::size_t count) {
    if (r0 + count > m.rows()) {
        throw DimensionError("slice_rows: range [" + std::to_string(r0) + ", " +
                             std::to_string(r0 + count) + ") exceeds " +
                             m.shape_str());
    }
    Matrix out(count, m.cols());
    std::copy(m.data() + r0 * m.cols(), m.data() + (r0 + count) * m.cols(),
              out.data());
    return out;
}

Matrix slice_cols(const Matrix& m, std::size_t c0, std::size_t count) {
    if (c0 + count > m.cols()) {
        throw DimensionError("slice_cols: range [" + std::to_string(c0) + ", " +
                             std::to_string(c0 + count) + ") exceeds " +
                             m.shape_str());
    }
    Matrix out(m.rows(), count);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < count; ++c) out.at(r, c) = m.at(r, c0 + c);
    }
    return out;
}

Matrix gather_rows(const Matrix& m, const std::vector<std::uint32_t>& row_ids) {
    Matrix out(row_ids.size(), m.cols());
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        if (row_ids[i] >= m.rows()) {
            throw DimensionError("gather_rows: row " + std::to_string(row_ids[i]) +
                                 " out of range for " + m.shape_str());
        }
        std::copy(m.data() + row_ids[i] * m.cols(),
                  m.data() + (row_ids[i] + 1) * m.cols(), out.data() + i * m.cols());
    }
    return out;
}

Matrix concat_rows(const std::vector<Matrix>& parts) {
    if (parts.empty()) throw ArgumentError("concat_rows: no parts");
    std::size_t rows = 0;
    for (const Matrix& p : parts) {
        if (p.cols() != parts.front().cols()) {
            shape_error("concat_rows", parts.front(), p);
        }
        rows += p.rows();
    }
    Matrix out(rows, parts.front().cols());
    std::size_t r0 = 0;
    for (const Matrix& p : parts) {
        std::copy(p.data(), p.data() + p.size(), out.data() + r0 * out.cols());
        r0 += p.rows();
    }
    return out;
}

Matrix concat_cols(const std::vector<Matrix>& parts) {
    if (parts.empty()) throw ArgumentError("concat_cols: no parts");
    std::size_t cols = 0;
    for (const Matrix& p : parts) {
        if (p.rows() != parts.front().rows()) {
            shape_error("concat_cols", parts.front(), p);
        }
        cols += p.cols();
    }
    Matrix out(parts.front().rows(), cols);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        std::size_t c0 = 0;
        for (const Matrix& p : parts) {
            for (std::size_t c = 0; c < p.cols(); ++c) out.at(r, c0 + c) = p.at(r, c);
            c0 += p.cols();
        }
    }
    return out;
}

Matrix reshape(const Matrix& m, std::size_t rows, std::size_t cols) {
    if (rows * cols != m.size()) {
        throw DimensionError("reshape: cannot view " + m.shape_str() + " as (" +
                             std::to_string(rows) + "x" + std::to_string(cols) +
                             ")");
    }
    return Matrix(rows, cols, m.values());
}

bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
    return a.same_shape(b) && max_abs_diff(a, b) <= tol;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) shape_error("max_abs_diff", a, b);
    double mx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mx = std::max(mx, std::abs(a.data()[i] - b.data()[i]));
    }
    return mx;
}

}  // namespace cdec
