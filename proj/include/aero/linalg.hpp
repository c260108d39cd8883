//
// Project     : aerosketch
// Module      : linalg.hpp
// Description : dense factorization kernels and randomized spectral estimators
//

#ifndef AERO_LINALG_HPP
#define AERO_LINALG_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "aero/errors.hpp"
#include "aero/rng.hpp"

namespace aero {

// dense real matrix; row-major semantics apply at the I/O boundary
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// thin singular value decomposition A = U diag(sigma) Vt
struct SvdResult {
    Matrix u;       // orthonormal columns
    Vector sigma;   // nonincreasing, nonnegative
    Matrix vt;      // orthonormal rows
};

// symmetric eigendecomposition B = V diag(lambda) V^T
struct EighResult {
    Vector lambda;  // nonincreasing (may be negative)
    Matrix v;       // orthonormal columns
};

// throws InvalidInput if any entry is NaN/Inf
void check_finite(const Matrix& a, const char* who);

// thin SVD with deterministic signs (largest-magnitude entry of each left
// singular vector made positive)
SvdResult svd(const Matrix& a);

// symmetric eigendecomposition of (b + b^T)/2, eigenvalues descending,
// deterministic signs
EighResult eigh(const Matrix& b);

// thin QR with nonnegative diagonal of R; requires rows >= cols
std::pair<Matrix, Matrix> qr(const Matrix& a);

// randomized estimate of the top squared singular value of `a` and the
// corresponding right singular direction: x <- A^T A x, normalized, k times
std::pair<double, Vector> power_iteration(const Matrix& a, int k, RngState rng);

struct SimulIterResult {
    Matrix z;             // rows(a) x k, orthonormal columns (approx. top left singular vectors)
    Vector sigma_hat;     // k nonincreasing singular value estimates
};

// randomized simultaneous (subspace) iteration for the top-k left singular
// subspace of `a`; iteration count q = ceil(c_q * log2(max(rows,2)) / eps_si)
SimulIterResult simul_iter(const Matrix& a, int k, double eps_si, RngState rng);

// module constant c_q in the simul_iter iteration count (see above)
inline constexpr double kSimulIterQConstant = 1.0;

// spectral norm via symmetric eigendecomposition of a symmetric matrix
double spectral_norm_sym(const Matrix& sym);

// spectral norm of a general matrix (largest singular value)
double spectral_norm(const Matrix& a);

}  // namespace aero

#endif  // AERO_LINALG_HPP
