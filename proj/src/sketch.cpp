//
// Project     : aerosketch
// Module      : sketch.cpp
// Description : single-level streaming covariance sketch
//

#include "aero/sketch.hpp"

#include <algorithm>
#include <cmath>

namespace aero {

namespace {

int power_iter_count(int d) {
    return static_cast<int>(std::ceil(std::log2(static_cast<double>(std::max(d, 2))))) + 1;
}

}  // namespace

AeroState::AeroState(int d, double eps, double theta, RngState rng, std::optional<double> delta)
    : d_(d), eps_(eps), ell_(0), theta_(theta), eps_si_(0.4), delta_(delta),
      c_(Matrix(0, d)), clock_(0), last_dump_t_(0), rng_(rng) {
    if (d < 1) throw InvalidInput("AeroState: d must be >= 1");
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("AeroState: eps out of (0,1]");
    if (theta < 0.0) throw InvalidInput("AeroState: theta must be >= 0");
    if (delta && !(*delta > 0.0 && *delta < 1.0))
        throw InvalidInput("AeroState: delta out of (0, 1)");
    ell_ = static_cast<int>(std::ceil(2.0 / eps));
}

void AeroState::set_theta(double theta) {
    if (theta < 0.0) throw InvalidInput("AeroState: theta must be >= 0");
    theta_ = theta;
}

void AeroState::set_eps_si(double v) {
    if (!(v > 0.0 && v < 1.0)) throw InvalidInput("AeroState: eps_si out of (0,1)");
    eps_si_ = v;
}

void AeroState::update(const Vector& a, std::int64_t i) { update_impl(a, i, false); }

void AeroState::update_amplified(const Vector& a, std::int64_t i) {
    if (!delta_) throw InvalidInput("AeroState: amplification requested without delta");
    update_impl(a, i, true);
}

SimulIterResult AeroState::factorize(const Matrix& at, int k, bool amplified) {
    if (!amplified) {
        ++stats_.simul_calls;
        return simul_iter(at, k, eps_si_, rng_.fork());
    }
    const double delta = *delta_;
    const int r = static_cast<int>(std::ceil(std::log(2.0 / delta) / std::log(100.0)));
    if (r <= 1) {  // degenerate amplification: one candidate, no selection
        ++stats_.simul_calls;
        return simul_iter(at, k, 0.2, rng_.fork());
    }
    const int s = static_cast<int>(std::ceil(2.0 * std::log(2.0 / delta) / std::log(3.0)));
    const int kp = power_iter_count(d_);

    SimulIterResult best;
    double best_cost = 0.0;
    for (int h = 0; h < r; ++h) {
        ++stats_.simul_calls;
        SimulIterResult cand = simul_iter(at, k, 0.2, rng_.fork());
        // residual spectral norm estimated by s power iterations, max taken
        const Matrix at_res = at - cand.z * (cand.z.transpose() * at);
        double cost = 0.0;
        for (int rep = 0; rep < s; ++rep)
            cost = std::max(cost, power_iteration(at_res, kp, rng_.fork()).first);
        if (h == 0 || cost < best_cost) {
            best_cost = cost;
            best = std::move(cand);
        }
    }
    return best;
}

void AeroState::update_impl(const Vector& a, std::int64_t i, bool amplified) {
    if (a.size() != d_) throw InvalidInput("AeroState: row dimension mismatch");
    if (!a.allFinite()) throw InvalidInput("AeroState: non-finite row");
    if (i <= clock_) throw InvalidInput("AeroState: timestamp regression");
    stats_ = UpdateStats{};

    // insert into the buffer; reduce when full
    Matrix cprime(c_.rows() + 1, d_);
    cprime.topRows(c_.rows()) = c_;
    cprime.row(c_.rows()) = a.transpose();
    if (cprime.rows() == 2 * static_cast<Eigen::Index>(ell_)) {
        cprime = fd_reduce(cprime, ell_).topRows(std::max(ell_ - 1, 1)).eval();
        stats_.reduced = true;
    }

    // cheap randomized gate on the top squared singular value
    const int kp = power_iter_count(d_);
    const double sigma1_sq = power_iteration(cprime.transpose(), kp, rng_.fork()).first;
    stats_.gate_fired = sigma1_sq >= 0.5 * theta_;

    if (!stats_.gate_fired) {
        c_ = std::move(cprime);
        clock_ = i;
        return;
    }

    // doubling search for the number of directions above theta
    const int kmax = static_cast<int>(
        std::min<Eigen::Index>({ell_, d_, cprime.rows()}));
    int k = std::min(2, kmax);
    while (true) {
        ++stats_.doubling_steps;
        const SimulIterResult fac = factorize(cprime.transpose(), k, amplified);
        const double tail = fac.sigma_hat(k - 1) * fac.sigma_hat(k - 1);
        if (tail < theta_ || k == kmax) {
            int xi = 0;
            for (int j = 0; j < k; ++j) {
                if (fac.sigma_hat(j) * fac.sigma_hat(j) >= theta_) xi = j + 1;
                else break;
            }
            if (xi >= 1) {
                Snapshot snap;
                snap.z = fac.z.leftCols(xi);
                snap.m = (cprime * snap.z).transpose() * cprime;  // before subtraction
                snap.s = last_dump_t_ + 1;
                snap.t = i;
                snap.theta = theta_;
                last_dump_t_ = i;
                c_ = cprime - (cprime * snap.z) * snap.z.transpose();
                snaps_.push_back(std::move(snap));
                stats_.dumped = true;
            } else {
                c_ = std::move(cprime);
            }
            break;
        }
        k = std::min(2 * k, kmax);
    }
    clock_ = i;
}

Matrix AeroState::query(std::int64_t lb, std::int64_t ub) const {
    if (lb >= ub) throw InvalidInput("AeroState: query needs lb < ub");
    if (ub > clock_) throw InvalidInput("AeroState: query beyond clock");

    Matrix b = Matrix::Zero(d_, d_);
    // the live residual covers rows since the last dump; it belongs to the
    // reconstruction only when the range ends at the present
    if (ub == clock_ && c_.rows() > 0) b = c_.transpose() * c_;

    // queue is time-sorted: bisect to the first snapshot with t > lb
    const auto first = std::lower_bound(
        snaps_.begin(), snaps_.end(), lb,
        [](const Snapshot& s, std::int64_t v) { return s.t <= v; });
    for (auto it = first; it != snaps_.end() && it->t <= ub; ++it)
        b += restore_contribution(*it);

    return shrink_to_sketch(b, ell_);
}

Matrix restore_contribution(const Snapshot& snap) {
    const Matrix zm = snap.z * snap.m;  // d x d
    return zm + zm.transpose() - snap.z * (snap.m * snap.z) * snap.z.transpose();
}

Matrix shrink_to_sketch(const Matrix& b, int ell) {
    const EighResult fac = eigh(b);
    const Eigen::Index d = b.rows();
    Vector lam = fac.lambda.cwiseMax(0.0);  // PSD analytically; clamp fp dips
    const double cut = (ell <= d) ? lam(ell - 1) : 0.0;
    Matrix out = Matrix::Zero(ell, d);
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(ell, d); ++i) {
        const double w = lam(i) - cut;
        if (w > 0.0) out.row(i) = std::sqrt(w) * fac.v.col(i).transpose();
    }
    return out;
}

}  // namespace aero
