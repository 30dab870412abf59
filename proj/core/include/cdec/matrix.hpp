#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace cdec {

// Dense row-major matrix of doubles. Immutable by convention once built:
// the free functions below return fresh matrices and never alias inputs,
// so values can be shared freely across threads.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols);
    static Matrix full(std::size_t rows, std::size_t cols, double value);
    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    const std::vector<double>& values() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    std::string shape_str() const;

    // Throws NumericError if any entry is NaN or infinite.
    void require_finite(const char* where) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Shape errors name both operand shapes.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& m, double s);

// out[r] = m[r] + bias, bias is 1 x cols.
Matrix add_row_vector(const Matrix& m, const Matrix& bias);

Matrix relu(const Matrix& m);
Matrix sigmoid(const Matrix& m);

// Per-row softmax with max subtraction. Rows sum to 1.
Matrix softmax_rows(const Matrix& m);
Matrix log_softmax_rows(const Matrix& m);

// Rows with Euclidean norm below eps pass through unchanged.
Matrix l2_normalize_rows(const Matrix& m, double eps);

// Per-row layer norm: gamma, beta are 1 x cols; population variance.
Matrix layer_norm_rows(const Matrix& m, const Matrix& gamma, const Matrix& beta,
                       double eps);

Matrix mean_rows(const Matrix& m);  // 1 x cols, mean over rows
double sum(const Matrix& m);
double mean(const Matrix& m);

Matrix slice_rows(const Matrix& m, std::size_t r0, std::size_t count);
Matrix slice_cols(const Matrix& m, std::size_t c0, std::size_t count);
Matrix gather_rows(const Matrix& m, const std::vector<std::uint32_t>& row_ids);
Matrix concat_rows(const std::vector<Matrix>& parts);
Matrix concat_cols(const std::vector<Matrix>& parts);
Matrix reshape(const Matrix& m, std::size_t rows, std::size_t cols);

bool approx_equal(const Matrix& a, const Matrix& b, double tol);
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace cdec
