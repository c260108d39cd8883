//
// Project     : aerosketch
// Module      : fd.cpp
// Description : deterministic shrink-and-forget reductions
//

#include "aero/fd.hpp"

#include <cmath>

namespace aero {

Matrix fd_reduce(const Matrix& b, int ell) {
    if (ell < 1) throw InvalidInput("fd_reduce: ell must be >= 1");
    if (b.rows() != 2 * static_cast<Eigen::Index>(ell))
        throw InvalidInput("fd_reduce: buffer must have exactly 2*ell rows");
    check_finite(b, "fd_reduce");
    if (b.norm() == 0.0) return Matrix::Zero(b.rows(), b.cols());

    const SvdResult fac = svd(b);
    const Eigen::Index nsv = fac.sigma.size();
    const double cut = (ell <= nsv) ? fac.sigma(ell - 1) * fac.sigma(ell - 1) : 0.0;
    Matrix out = Matrix::Zero(b.rows(), b.cols());
    for (Eigen::Index i = 0; i < nsv; ++i) {
        const double s2 = fac.sigma(i) * fac.sigma(i) - cut;
        if (s2 > 0.0) out.row(i) = std::sqrt(s2) * fac.vt.row(i);
    }
    return out;
}

FdStream::FdStream(int d, int ell)
    : d_(d), ell_(ell), filled_(0), reduces_(0), buf_(Matrix::Zero(2 * ell, d)) {
    if (d < 1) throw InvalidInput("FdStream: d must be >= 1");
    if (ell < 1) throw InvalidInput("FdStream: ell must be >= 1");
}

void FdStream::insert(const Vector& row) {
    if (row.size() != d_) throw InvalidInput("FdStream: row dimension mismatch");
    if (!row.allFinite()) throw InvalidInput("FdStream: non-finite row");
    buf_.row(filled_++) = row.transpose();
    if (filled_ == 2 * ell_) {
        buf_ = fd_reduce(buf_, ell_);
        ++reduces_;
        // rows at index >= ell-1 are zero after the shrink
        filled_ = ell_ - 1;
    }
}

Matrix fd_stream(const std::vector<Vector>& rows, int ell) {
    if (rows.empty()) throw InvalidInput("fd_stream: empty stream");
    FdStream fd(static_cast<int>(rows.front().size()), ell);
    for (const Vector& r : rows) fd.insert(r);
    return fd.sketch();
}

std::pair<Matrix, Matrix> cod_reduce(const Matrix& a, const Matrix& b, int ell) {
    if (ell < 1) throw InvalidInput("cod_reduce: ell must be >= 1");
    if (a.cols() != b.cols()) throw InvalidInput("cod_reduce: column-count mismatch");
    check_finite(a, "cod_reduce");
    check_finite(b, "cod_reduce");
    if (a.norm() == 0.0 || b.norm() == 0.0)
        return {Matrix::Zero(a.rows(), a.cols()), Matrix::Zero(b.rows(), b.cols())};

    // thin QR factors of arbitrary shape (Q has min(rows, cols) columns)
    const auto thin_qr = [](const Matrix& m) {
        const Eigen::Index k = std::min(m.rows(), m.cols());
        Eigen::HouseholderQR<Matrix> fac(m);
        Matrix q = fac.householderQ() * Matrix::Identity(m.rows(), k);
        Matrix r = q.transpose() * m;
        return std::make_pair(std::move(q), std::move(r));
    };
    const auto [qa, ra] = thin_qr(a);
    const auto [qb, rb] = thin_qr(b);

    const SvdResult fac = svd(ra * rb.transpose());
    const Eigen::Index nsv = fac.sigma.size();
    const double cut = (ell <= nsv) ? fac.sigma(ell - 1) : 0.0;
    Vector w = Vector::Zero(nsv);
    for (Eigen::Index i = 0; i < nsv; ++i) w(i) = std::sqrt(std::max(fac.sigma(i) - cut, 0.0));

    Matrix aprime = Matrix::Zero(a.rows(), a.cols());
    Matrix bprime = Matrix::Zero(b.rows(), b.cols());
    aprime.leftCols(nsv) = qa * fac.u * w.asDiagonal();
    bprime.leftCols(nsv) = qb * fac.vt.transpose() * w.asDiagonal();
    return {std::move(aprime), std::move(bprime)};
}

}  // namespace aero
