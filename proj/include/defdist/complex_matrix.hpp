#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace defdist {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense complex matrix with row-major storage: entry (i, j) lives at
/// index i*cols + j.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    /// Zero-initialized rows x cols matrix.
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    /// Adopts `entries` (row-major); throws DimensionMismatchError if the
    /// count does not equal rows*cols.
    ComplexMatrix(std::size_t rows, std::size_t cols, ComplexVector entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Complex* row(std::size_t i) { return data_.data() + i * cols_; }
    const Complex* row(std::size_t i) const { return data_.data() + i * cols_; }

    const ComplexVector& entries() const { return data_; }
    ComplexVector& entries() { return data_; }

    bool operator==(const ComplexMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    ComplexVector data_;
};

ComplexMatrix identity(std::size_t n);
ComplexMatrix conj_transpose(const ComplexMatrix& A);
ComplexMatrix operator*(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexMatrix operator-(const ComplexMatrix& A, const ComplexMatrix& B);

/// y = A x
ComplexVector matvec(const ComplexMatrix& A, const ComplexVector& x);
/// y = A^H x
ComplexVector adjoint_matvec(const ComplexMatrix& A, const ComplexVector& x);

double frobenius_norm(const ComplexMatrix& A);
double one_norm(const ComplexMatrix& A);  // max absolute column sum
double max_abs(const ComplexMatrix& A);

/// Throws NonFiniteError if any entry is NaN or infinite.
void check_finite(const ComplexMatrix& A, const char* context);
void check_finite(const ComplexVector& x, const char* context);

double norm2(const ComplexVector& x);
/// x^H y
Complex dot(const ComplexVector& x, const ComplexVector& y);

}  // namespace defdist
