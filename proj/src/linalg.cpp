//
// Project     : aerosketch
// Module      : linalg.cpp
// Description : dense factorization kernels and randomized spectral estimators
//

#include "aero/linalg.hpp"

#include <cmath>

namespace aero {

namespace {

// make the largest-magnitude entry of each column of `m` positive; if
// `paired_rows` is given, its rows are flipped in tandem (V^T rows for SVD)
void fix_column_signs(Matrix& m, Matrix* paired_rows = nullptr) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Eigen::Index at = 0;
        m.col(j).cwiseAbs().maxCoeff(&at);
        if (m(at, j) < 0.0) {
            m.col(j) = -m.col(j);
            if (paired_rows) paired_rows->row(j) = -paired_rows->row(j);
        }
    }
}

// thin orthonormalization: Q factor of a tall matrix (rows >= cols assumed)
Matrix orthonormalize(const Matrix& g) {
    Eigen::HouseholderQR<Matrix> fac(g);
    Matrix q = fac.householderQ() * Matrix::Identity(g.rows(), g.cols());
    return q;
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngState& rng) {
    Matrix g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = rng.gaussian();
    return g;
}

}  // namespace

void check_finite(const Matrix& a, const char* who) {
    if (!a.allFinite()) throw InvalidInput(std::string(who) + ": non-finite entry");
}

SvdResult svd(const Matrix& a) {
    if (a.size() == 0) throw InvalidInput("svd: empty input");
    check_finite(a, "svd");
    Eigen::BDCSVD<Matrix> fac(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdResult out;
    out.u = fac.matrixU();
    out.sigma = fac.singularValues();
    out.vt = fac.matrixV().transpose();
    fix_column_signs(out.u, &out.vt);
    return out;
}

EighResult eigh(const Matrix& b) {
    if (b.size() == 0) throw InvalidInput("eigh: empty input");
    if (b.rows() != b.cols()) throw InvalidInput("eigh: input not square");
    check_finite(b, "eigh");
    const Matrix sym = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> fac(sym);
    const Eigen::Index n = b.rows();
    EighResult out;
    out.lambda = Vector(n);
    out.v = Matrix(n, n);
    // Eigen sorts ascending; emit descending
    for (Eigen::Index i = 0; i < n; ++i) {
        out.lambda(i) = fac.eigenvalues()(n - 1 - i);
        out.v.col(i) = fac.eigenvectors().col(n - 1 - i);
    }
    fix_column_signs(out.v);
    return out;
}

std::pair<Matrix, Matrix> qr(const Matrix& a) {
    if (a.size() == 0) throw InvalidInput("qr: empty input");
    if (a.rows() < a.cols()) throw InvalidInput("qr: rows < cols (pad or transpose first)");
    check_finite(a, "qr");
    Eigen::HouseholderQR<Matrix> fac(a);
    Matrix q = fac.householderQ() * Matrix::Identity(a.rows(), a.cols());
    Matrix r = fac.matrixQR().topRows(a.cols()).template triangularView<Eigen::Upper>();
    // sign convention: nonnegative diagonal of R
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        if (r(i, i) < 0.0) {
            r.row(i) = -r.row(i);
            q.col(i) = -q.col(i);
        }
    }
    return {std::move(q), std::move(r)};
}

std::pair<double, Vector> power_iteration(const Matrix& a, int k, RngState rng) {
    if (k < 1) throw InvalidInput("power_iteration: k must be >= 1");
    if (a.size() == 0) throw InvalidInput("power_iteration: empty input");
    check_finite(a, "power_iteration");
    const Eigen::Index n = a.cols();
    if (a.norm() == 0.0) {
        Vector e1 = Vector::Zero(n);
        e1(0) = 1.0;
        return {0.0, e1};
    }
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.gaussian();
    x.normalize();
    for (int it = 0; it < k; ++it) {
        Vector y = a.transpose() * (a * x);
        const double nrm = y.norm();
        if (nrm < 1e-300) {  // start vector fell in the null space
            Vector e1 = Vector::Zero(n);
            e1(0) = 1.0;
            return {0.0, e1};
        }
        x = y / nrm;
    }
    const double sigma1_sq = (a * x).squaredNorm();
    return {sigma1_sq, x};
}

SimulIterResult simul_iter(const Matrix& a, int k, double eps_si, RngState rng) {
    if (a.size() == 0) throw InvalidInput("simul_iter: empty input");
    if (k < 1 || k > std::min(a.rows(), a.cols()))
        throw InvalidInput("simul_iter: k out of range");
    if (!(eps_si > 0.0 && eps_si < 1.0)) throw InvalidInput("simul_iter: eps_si out of (0,1)");
    check_finite(a, "simul_iter");

    const Eigen::Index d = a.rows();
    SimulIterResult out;
    if (a.norm() == 0.0) {  // zero input: canonical basis, zero estimates
        out.z = Matrix::Identity(d, k);
        out.sigma_hat = Vector::Zero(k);
        return out;
    }

    const int q = static_cast<int>(std::ceil(
        kSimulIterQConstant * std::log2(static_cast<double>(std::max<Eigen::Index>(d, 2))) / eps_si));

    Matrix pi = gaussian_matrix(a.cols(), k, rng);
    Matrix g = orthonormalize(a * pi);
    for (int it = 0; it < q; ++it) g = orthonormalize(a * (a.transpose() * g));

    const Matrix w = a.transpose() * g;      // cols(a) x k
    const EighResult m = eigh(w.transpose() * w);
    out.sigma_hat = Vector(k);
    for (int i = 0; i < k; ++i) out.sigma_hat(i) = std::sqrt(std::max(m.lambda(i), 0.0));
    out.z = g * m.v;
    fix_column_signs(out.z);
    return out;
}

double spectral_norm_sym(const Matrix& sym) {
    if (sym.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> fac(0.5 * (sym + sym.transpose()),
                                              Eigen::EigenvaluesOnly);
    return fac.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0 || a.norm() == 0.0) return 0.0;
    Eigen::BDCSVD<Matrix> fac(a);
    return fac.singularValues()(0);
}

}  // namespace aero
