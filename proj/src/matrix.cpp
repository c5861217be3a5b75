#include "uec/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uec/error.hpp"

namespace uec {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw ShapeMismatch("buffer of " + std::to_string(data_.size()) + " values for a " + std::to_string(rows) +
                            "x" + std::to_string(cols) + " matrix");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeMismatch("ragged initializer list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::slice_rows(std::size_t begin, std::size_t count) const {
    if (begin + count > rows_) {
        throw ShapeMismatch("row slice [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                            ") out of " + std::to_string(rows_) + " rows");
    }
    auto first = data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_);
    return Matrix(count, cols_, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count * cols_)));
}

Matrix Matrix::transposed() const {
    Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
}

void Matrix::set_rows(std::size_t begin, const Matrix& src) {
    if (src.cols_ != cols_ || begin + src.rows_ > rows_) throw ShapeMismatch("set_rows out of range");
    std::copy(src.data_.begin(), src.data_.end(), data_.begin() + static_cast<std::ptrdiff_t>(begin * cols_));
}

Matrix vstack(std::initializer_list<const Matrix*> parts) {
    std::size_t rows = 0;
    std::size_t cols = parts.size() == 0 ? 0 : (*parts.begin())->cols();
    for (const Matrix* p : parts) {
        if (p->cols() != cols) throw ShapeMismatch("vstack column mismatch");
        rows += p->rows();
    }
    std::vector<double> data;
    data.reserve(rows * cols);
    for (const Matrix* p : parts) data.insert(data.end(), p->storage().begin(), p->storage().end());
    return Matrix(rows, cols, std::move(data));
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* context) {
    if (!a.same_shape(b)) {
        throw ShapeMismatch(std::string(context) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "operator+");
    Matrix out = a;
    auto o = out.flat();
    auto y = b.flat();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += y[i];
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "operator-");
    Matrix out = a;
    auto o = out.flat();
    auto y = b.flat();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] -= y[i];
    return out;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix out = a;
    for (double& v : out.flat()) v *= s;
    return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    auto x = a.flat();
    auto y = b.flat();
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

bool all_finite(const Matrix& a) {
    return std::all_of(a.flat().begin(), a.flat().end(), [](double v) { return std::isfinite(v); });
}

} // namespace uec
