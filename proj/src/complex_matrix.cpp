#include "defdist/complex_matrix.hpp"

#include <cmath>
#include <string>

#include "defdist/errors.hpp"

namespace defdist {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, ComplexVector entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionMismatchError("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                                     " does not match " + std::to_string(rows_) + "x" +
                                     std::to_string(cols_));
    }
}

ComplexMatrix identity(std::size_t n) {
    ComplexMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

ComplexMatrix conj_transpose(const ComplexMatrix& A) {
    ComplexMatrix T(A.cols(), A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) T(j, i) = std::conj(A(i, j));
    return T;
}

ComplexMatrix operator*(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.cols() != B.rows())
        throw DimensionMismatchError("matrix product: inner dimensions differ");
    ComplexMatrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const Complex a = A(i, k);
            if (a == 0.0) continue;
            const Complex* brow = B.row(k);
            Complex* crow = C.row(i);
            for (std::size_t j = 0; j < B.cols(); ++j) {
                const double ar = a.real(), ai = a.imag();
                const double br = brow[j].real(), bi = brow[j].imag();
                crow[j] += Complex(ar * br - ai * bi, ar * bi + ai * br);
            }
        }
    }
    return C;
}

ComplexMatrix operator-(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw DimensionMismatchError("matrix difference: shapes differ");
    ComplexMatrix C(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.entries().size(); ++i)
        C.entries()[i] = A.entries()[i] - B.entries()[i];
    return C;
}

ComplexVector matvec(const ComplexMatrix& A, const ComplexVector& x) {
    if (x.size() != A.cols()) throw DimensionMismatchError("matvec: length mismatch");
    ComplexVector y(A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const Complex* arow = A.row(i);
        double sr = 0.0, si = 0.0;
        for (std::size_t j = 0; j < A.cols(); ++j) {
            const double ar = arow[j].real(), ai = arow[j].imag();
            const double xr = x[j].real(), xi = x[j].imag();
            sr += ar * xr - ai * xi;
            si += ar * xi + ai * xr;
        }
        y[i] = Complex(sr, si);
    }
    return y;
}

ComplexVector adjoint_matvec(const ComplexMatrix& A, const ComplexVector& x) {
    if (x.size() != A.rows()) throw DimensionMismatchError("adjoint_matvec: length mismatch");
    ComplexVector y(A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const Complex* arow = A.row(i);
        const double xr = x[i].real(), xi = x[i].imag();
        for (std::size_t j = 0; j < A.cols(); ++j) {
            // y_j += conj(A(i,j)) * x_i
            const double ar = arow[j].real(), ai = arow[j].imag();
            y[j] += Complex(ar * xr + ai * xi, ar * xi - ai * xr);
        }
    }
    return y;
}

double frobenius_norm(const ComplexMatrix& A) {
    double s = 0.0;
    for (const Complex& e : A.entries()) s += std::norm(e);
    return std::sqrt(s);
}

double one_norm(const ComplexMatrix& A) {
    double best = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < A.rows(); ++i) s += std::abs(A(i, j));
        best = std::max(best, s);
    }
    return best;
}

double max_abs(const ComplexMatrix& A) {
    double best = 0.0;
    for (const Complex& e : A.entries()) best = std::max(best, std::abs(e));
    return best;
}

void check_finite(const ComplexMatrix& A, const char* context) {
    for (const Complex& e : A.entries())
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
            throw NonFiniteError(std::string(context) + ": matrix has a NaN/Inf entry");
}

void check_finite(const ComplexVector& x, const char* context) {
    for (const Complex& e : x)
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
            throw NonFiniteError(std::string(context) + ": vector has a NaN/Inf entry");
}

double norm2(const ComplexVector& x) {
    double s = 0.0;
    for (const Complex& e : x) s += std::norm(e);
    return std::sqrt(s);
}

Complex dot(const ComplexVector& x, const ComplexVector& y) {
    if (x.size() != y.size()) throw DimensionMismatchError("dot: length mismatch");
    double sr = 0.0, si = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        const double yr = y[i].real(), yi = y[i].imag();
        sr += xr * yr + xi * yi;
        si += xr * yi - xi * yr;
    }
    return Complex(sr, si);
}

}  // namespace defdist
