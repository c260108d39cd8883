//
// Project     : aerosketch
// Module      : amm.cpp
// Description : sliding-window approximate matrix multiplication sketch
//

#include "aero/amm.hpp"

#include <algorithm>
#include <cmath>

namespace aero {

namespace {

int power_iter_count(int base) {
    return static_cast<int>(std::ceil(std::log2(static_cast<double>(std::max(base, 2))))) + 1;
}

}  // namespace

Matrix cod_restore_contribution(const CodSnapshot& snap) {
    return snap.z * snap.zm + snap.mh * snap.h.transpose()
         - snap.z * (snap.zm * snap.h) * snap.h.transpose();
}

CodState::CodState(int d_x, int d_y, double eps, double theta, std::int64_t n, RngState rng)
    : dx_(d_x), dy_(d_y), eps_(eps), ell_(0), theta_(theta), n_(n),
      a_(Matrix(d_x, 0)), b_(Matrix(d_y, 0)), clock_(0), last_dump_t_(0), rng_(rng) {
    if (d_x < 1 || d_y < 1) throw InvalidInput("CodState: dimensions must be >= 1");
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("CodState: eps out of (0,1]");
    if (theta < 0.0) throw InvalidInput("CodState: theta must be >= 0");
    if (n < 1) throw InvalidInput("CodState: window size must be >= 1");
    ell_ = static_cast<int>(std::ceil(2.0 / eps));
}

void CodState::set_theta(double theta) {
    if (theta < 0.0) throw InvalidInput("CodState: theta must be >= 0");
    theta_ = theta;
}

void CodState::update(const Vector& x, const Vector& y, std::int64_t i) {
    if (x.size() != dx_ || y.size() != dy_) throw InvalidInput("CodState: dimension mismatch");
    if (!x.allFinite() || !y.allFinite()) throw InvalidInput("CodState: non-finite input");
    if (i <= clock_) throw InvalidInput("CodState: timestamp regression");

    // expire snapshots that slid out of the window
    while (!snaps_.empty() && snaps_.front().t + n_ <= i) snaps_.pop_front();

    // append the column pair
    a_.conservativeResize(Eigen::NoChange, a_.cols() + 1);
    b_.conservativeResize(Eigen::NoChange, b_.cols() + 1);
    a_.col(a_.cols() - 1) = x;
    b_.col(b_.cols() - 1) = y;

    if (a_.cols() == 2 * static_cast<Eigen::Index>(ell_)) {
        auto [ap, bp] = cod_reduce(a_, b_, ell_);
        // at most ell-1 columns survive the shrink
        const Eigen::Index keep = std::max(ell_ - 1, 1);
        a_ = ap.leftCols(keep).eval();
        b_ = bp.leftCols(keep).eval();
    }

    // randomized gate on the top singular value of the residual product
    const Matrix p = a_ * b_.transpose();
    const int kp = power_iter_count(ell_);
    const double sigma1 = std::sqrt(power_iteration(p, kp, rng_.fork()).first);
    if (sigma1 < 0.5 * theta_) {
        clock_ = i;
        return;
    }

    const int kmax = static_cast<int>(
        std::min<Eigen::Index>({ell_, dx_, dy_, a_.cols()}));
    int k = std::min(2, kmax);
    while (true) {
        const SimulIterResult zfac = simul_iter(p, k, 0.4, rng_.fork());
        const SimulIterResult hfac = simul_iter(p.transpose(), k, 0.4, rng_.fork());
        if (zfac.sigma_hat(k - 1) < theta_ || k == kmax) {
            int xi = 0;
            for (int j = 0; j < k; ++j) {
                if (zfac.sigma_hat(j) >= theta_) xi = j + 1;
                else break;
            }
            if (xi >= 1) {
                CodSnapshot snap;
                snap.z = zfac.z.leftCols(xi);
                snap.h = hfac.z.leftCols(xi);
                snap.zm = snap.z.transpose() * p;
                snap.mh = p * snap.h;
                snap.s = last_dump_t_ + 1;
                snap.t = i;
                last_dump_t_ = i;
                a_ -= snap.z * (snap.z.transpose() * a_);
                b_ -= snap.h * (snap.h.transpose() * b_);
                snaps_.push_back(std::move(snap));
            }
            break;
        }
        k = std::min(2 * k, kmax);
    }
    clock_ = i;
}

std::pair<Matrix, Matrix> CodState::query() const {
    Matrix p = a_ * b_.transpose();
    for (const CodSnapshot& s : snaps_) p += cod_restore_contribution(s);

    Matrix astar = Matrix::Zero(dx_, ell_);
    Matrix bstar = Matrix::Zero(dy_, ell_);
    if (p.norm() > 0.0) {
        const SvdResult fac = svd(p);
        const Eigen::Index nsv = fac.sigma.size();
        const double cut = (ell_ <= nsv) ? fac.sigma(ell_ - 1) : 0.0;
        for (Eigen::Index j = 0; j < std::min<Eigen::Index>(ell_, nsv); ++j) {
            const double w = std::sqrt(std::max(fac.sigma(j) - cut, 0.0));
            astar.col(j) = w * fac.u.col(j);
            bstar.col(j) = w * fac.vt.row(j).transpose();
        }
    }
    return {std::move(astar), std::move(bstar)};
}

std::int64_t CodState::stored_floats() const {
    std::int64_t total = a_.size() + b_.size();
    for (const CodSnapshot& s : snaps_)
        total += s.z.size() + s.h.size() + s.zm.size() + s.mh.size();
    return total;
}

AdaptiveState::AdaptiveState(int d_x, int d_y, double eps, double theta0, std::int64_t n,
                             RngState rng)
    : eps_(eps), theta0_(theta0), n_(n), level_(1),
      main_(d_x, d_y, eps, theta0, n, rng.fork()),
      aux_(d_x, d_y, eps, theta0, n, rng.fork()),
      rng_(rng) {
    if (theta0 <= 0.0) throw InvalidInput("AdaptiveState: theta0 must be > 0");
}

void AdaptiveState::update(const Vector& x, const Vector& y, std::int64_t i) {
    // window boundary: the auxiliary sketch, built from the previous
    // boundary, becomes the main one and a fresh auxiliary starts
    if (i > 1 && (i % n_) == 1) {
        main_ = aux_;
        aux_ = CodState(main_.d_x(), main_.d_y(), eps_, main_.theta(), n_, rng_.fork());
    }
    main_.update(x, y, i);
    aux_.update(x, y, i);

    // queue-length-driven threshold adaptation
    const double qlen = static_cast<double>(main_.snaps().size());
    if (qlen >= static_cast<double>(level_) / eps_) {
        ++level_;
        main_.set_theta(2.0 * main_.theta());
        aux_.set_theta(2.0 * aux_.theta());
    } else if (level_ > 1 && qlen <= static_cast<double>(level_ - 1) / eps_) {
        --level_;
        main_.set_theta(0.5 * main_.theta());
        aux_.set_theta(0.5 * aux_.theta());
    }
}

}  // namespace aero
