#include "fffheat/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fffheat {

void CsrMatrix::multiply(const double* x, double* y) const {
    for (std::size_t r = 0; r < n; ++r) {
        double sum = 0.0;
        const std::size_t end = row_ptr[r + 1];
        for (std::size_t e = row_ptr[r]; e < end; ++e) sum += vals[e] * x[cols[e]];
        y[r] = sum;
    }
}

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(n);
    multiply(x.data(), y.data());
}

std::size_t CsrMatrix::entry_index(std::size_t row, std::int32_t col) const {
    const auto first = cols.begin() + row_ptr[row];
    const auto last = cols.begin() + row_ptr[row + 1];
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col)
        throw std::out_of_range("CsrMatrix: entry (" + std::to_string(row) + ", " +
                                std::to_string(col) + ") is not in the pattern");
    return static_cast<std::size_t>(it - cols.begin());
}

double& CsrMatrix::at(std::size_t row, std::int32_t col) {
    return vals[entry_index(row, col)];
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

PcgResult pcg_jacobi(const CsrMatrix& A, const std::vector<double>& b,
                     std::vector<double>& x, const PcgOptions& opt) {
    const std::size_t n = A.n;
    if (b.size() != n) throw std::invalid_argument("pcg_jacobi: rhs size mismatch");
    x.resize(n, 0.0);
    const std::size_t max_iter = opt.max_iter ? opt.max_iter : 10 * n;

    std::vector<double> inv_diag(n);
    for (std::size_t r = 0; r < n; ++r) {
        double d = 0.0;
        for (std::size_t e = A.row_ptr[r]; e < A.row_ptr[r + 1]; ++e)
            if (A.cols[e] == static_cast<std::int32_t>(r)) d = A.vals[e];
        if (!(d > 0.0))
            throw SolverError("pcg_jacobi: non-positive diagonal at row " + std::to_string(r),
                              0, 0.0);
        inv_diag[r] = 1.0 / d;
    }

    const double bnorm = norm(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return {0, 0.0};
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    A.multiply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

    double rnorm = norm(r);
    if (rnorm <= opt.rel_tol * bnorm) return {0, rnorm / bnorm};

    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);

    for (std::size_t it = 1; it <= max_iter; ++it) {
        A.multiply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0))
            throw SolverError("pcg_jacobi: matrix is not positive definite (p'Ap = " +
                                  std::to_string(pq) + ")",
                              it, rnorm / bnorm);
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        rnorm = norm(r);
        if (rnorm <= opt.rel_tol * bnorm) return {it, rnorm / bnorm};
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    std::ostringstream msg;
    msg << "pcg_jacobi: no convergence after " << max_iter
        << " iterations, relative residual " << rnorm / bnorm << " (tolerance "
        << opt.rel_tol << ")";
    throw SolverError(msg.str(), max_iter, rnorm / bnorm);
}

}  // namespace fffheat
