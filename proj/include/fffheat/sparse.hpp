#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fffheat {

// Compressed sparse row matrix, square, symmetric positive (semi)definite in
// all uses here.
struct CsrMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;  // n + 1
    std::vector<std::int32_t> cols;
    std::vector<double> vals;

    void multiply(const double* x, double* y) const;
    void multiply(const std::vector<double>& x, std::vector<double>& y) const;

    // Index into vals for entry (row, col); throws if absent from the pattern.
    std::size_t entry_index(std::size_t row, std::int32_t col) const;
    double& at(std::size_t row, std::int32_t col);
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, std::size_t iterations, double rel_residual)
        : std::runtime_error(msg), iterations(iterations), rel_residual(rel_residual) {}
    std::size_t iterations;
    double rel_residual;
};

struct PcgOptions {
    double rel_tol = 1e-8;      // on ||b - A x|| / ||b||
    std::size_t max_iter = 0;   // 0: 10 * n
};

struct PcgResult {
    std::size_t iterations = 0;
    double rel_residual = 0.0;
};

// Jacobi-preconditioned conjugate gradients. `x` is the initial guess on
// entry and the solution on exit. Throws SolverError on non-convergence.
PcgResult pcg_jacobi(const CsrMatrix& A, const std::vector<double>& b,
                     std::vector<double>& x, const PcgOptions& opt = {});

}  // namespace fffheat
