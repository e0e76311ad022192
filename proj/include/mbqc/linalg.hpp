// linalg.hpp
//
// Dense complex matrices sized for few-qubit work (operators up to 16x16,
// density matrices up to a few thousand rows). Row-major storage, no
// external dependencies.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbqc {

using cplx = std::complex<double>;

constexpr double kNormTol = 1e-12;      // state normalization
constexpr double kUnitaryTol = 1e-10;   // operator unitarity
constexpr double kPsdFloor = 1e-10;     // eigenvalue floor for density matrices

class ComplexMatrix {
public:
    ComplexMatrix() : rows_(0), cols_(0) {}
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_)
            throw std::invalid_argument("ComplexMatrix: data size does not match shape");
    }

    // Row-major initializer, e.g. ComplexMatrix::from_rows({{a,b},{c,d}}).
    static ComplexMatrix from_rows(const std::vector<std::vector<cplx>>& rows) {
        if (rows.empty()) return {};
        ComplexMatrix m(rows.size(), rows[0].size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols_)
                throw std::invalid_argument("ComplexMatrix: ragged rows");
            for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
        }
        return m;
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    ComplexMatrix operator*(const ComplexMatrix& o) const {
        if (cols_ != o.rows_)
            throw std::invalid_argument("ComplexMatrix: shape mismatch in product");
        ComplexMatrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const cplx a = (*this)(i, k);
                if (a == cplx{0.0, 0.0}) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    ComplexMatrix operator+(const ComplexMatrix& o) const {
        check_same_shape(o, "sum");
        ComplexMatrix r = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
        return r;
    }

    ComplexMatrix operator-(const ComplexMatrix& o) const {
        check_same_shape(o, "difference");
        ComplexMatrix r = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
        return r;
    }

    ComplexMatrix operator*(cplx s) const {
        ComplexMatrix r = *this;
        for (auto& v : r.data_) v *= s;
        return r;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    cplx trace() const {
        if (rows_ != cols_) throw std::invalid_argument("ComplexMatrix: trace of non-square");
        cplx t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs_diff(const ComplexMatrix& o) const {
        check_same_shape(o, "comparison");
        double m = 0.0;
        for (std::size_t i = 0; i < data_.size(); ++i)
            m = std::max(m, std::abs(data_[i] - o.data_[i]));
        return m;
    }

    bool approx_equal(const ComplexMatrix& o, double tol) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && max_abs_diff(o) <= tol;
    }

    bool is_unitary(double tol = kUnitaryTol) const {
        if (rows_ != cols_) return false;
        return (adjoint() * (*this)).approx_equal(identity(rows_), tol);
    }

    bool is_hermitian(double tol = 1e-10) const {
        if (rows_ != cols_) return false;
        return approx_equal(adjoint(), tol);
    }

private:
    void check_same_shape(const ComplexMatrix& o, const char* what) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string("ComplexMatrix: shape mismatch in ") + what);
    }

    std::size_t rows_, cols_;
    std::vector<cplx> data_;
};

inline ComplexMatrix operator*(cplx s, const ComplexMatrix& m) { return m * s; }

// Kronecker product; the left factor owns the most significant index bits.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ia = 0; ia < a.rows(); ++ia)
        for (std::size_t ja = 0; ja < a.cols(); ++ja) {
            const cplx v = a(ia, ja);
            if (v == cplx{0.0, 0.0}) continue;
            for (std::size_t ib = 0; ib < b.rows(); ++ib)
                for (std::size_t jb = 0; jb < b.cols(); ++jb)
                    r(ia * b.rows() + ib, ja * b.cols() + jb) = v * b(ib, jb);
        }
    return r;
}

// Eigenvalues of a Hermitian matrix by cyclic Jacobi sweeps. Adequate for the
// small (<= 64 x 64) matrices this project touches.
inline std::vector<double> hermitian_eigenvalues(ComplexMatrix a, double tol = 1e-13) {
    if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_eigenvalues: non-square");
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (off <= tol * tol) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double app = a(p, p).real(), aqq = a(q, q).real();
                // Factor the phase out of the pivot (diag(1, e^{-i phi})),
                // then a real Jacobi angle zeroes the off-diagonal entry.
                const double phi = std::arg(apq);
                const double theta = 0.5 * std::atan2(2.0 * std::abs(apq), app - aqq);
                const double c = std::cos(theta), s = std::sin(theta);
                const cplx em = std::exp(cplx(0.0, -phi)), ep = std::conj(em);
                // a <- R^dag a R with R[pp]=c, R[pq]=-s, R[qp]=s e^{-i phi},
                // R[qq]=c e^{-i phi}.
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp + s * em * akq;
                    a(k, q) = -s * akp + c * em * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk + s * ep * aqk;
                    a(q, k) = -s * apk + c * ep * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i).real();
    return ev;
}

}  // namespace mbqc
