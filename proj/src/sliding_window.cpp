//
// Project     : aerosketch
// Module      : sliding_window.cpp
// Description : multi-level sliding-window covariance sketch
//

#include "aero/sliding_window.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aero {

MlState::MlState(int d, std::int64_t n, double r_max, double eps, RngState rng,
                 std::optional<double> delta)
    : d_(d), n_(n), r_max_(r_max), eps_(eps), ell_(0), cap_(0),
      amplified_(delta.has_value()), clock_(0), window_mass_(0.0), norm_warnings_(0) {
    if (n < 1) throw InvalidInput("MlState: window size must be >= 1");
    if (r_max < 1.0) throw InvalidInput("MlState: r_max must be >= 1 (squared norms in [1, R])");
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("MlState: eps out of (0,1]");
    ell_ = static_cast<int>(std::ceil(2.0 / eps));
    cap_ = static_cast<std::int64_t>(std::ceil(8.0 / eps));
    const int big_l = static_cast<int>(std::ceil(std::log2(std::max(r_max, 2.0))));
    for (int j = 0; j < std::max(big_l, 1); ++j) {
        const double theta_j = std::pow(2.0, j) * eps * static_cast<double>(n);
        levels_.emplace_back(d, eps, theta_j, rng.fork(), delta);
        heavy_.emplace_back();
    }
}

std::int64_t MlState::combined_len(int j) const {
    return static_cast<std::int64_t>(levels_[j].snaps().size() + heavy_[j].size());
}

std::int64_t MlState::front_t(int j) const {
    std::int64_t t = std::numeric_limits<std::int64_t>::max();
    if (!levels_[j].snaps().empty()) t = std::min(t, levels_[j].snaps().front().t);
    if (!heavy_[j].empty()) t = std::min(t, heavy_[j].front().t);
    return t;
}

std::int64_t MlState::front_s(int j) const {
    const auto& snaps = levels_[j].snaps();
    const auto& hv = heavy_[j];
    if (snaps.empty() && hv.empty()) return std::numeric_limits<std::int64_t>::max();
    if (snaps.empty()) return hv.front().s;
    if (hv.empty()) return snaps.front().s;
    return (snaps.front().t <= hv.front().t) ? snaps.front().s : hv.front().s;
}

std::int64_t MlState::tail_t(int j) const {
    std::int64_t t = 0;
    if (!levels_[j].snaps().empty()) t = std::max(t, levels_[j].snaps().back().t);
    if (!heavy_[j].empty()) t = std::max(t, heavy_[j].back().t);
    return t;
}

void MlState::pop_front(int j) {
    auto& snaps = levels_[j].snaps();
    auto& hv = heavy_[j];
    if (snaps.empty() && hv.empty()) return;
    if (hv.empty() || (!snaps.empty() && snaps.front().t <= hv.front().t)) snaps.pop_front();
    else hv.pop_front();
}

void MlState::update(const Vector& a, std::int64_t i) {
    if (a.size() != d_) throw InvalidInput("MlState: row dimension mismatch");
    if (!a.allFinite()) throw InvalidInput("MlState: non-finite row");
    if (i <= clock_) throw InvalidInput("MlState: timestamp regression");

    const double nsq = a.squaredNorm();
    if (nsq < 1.0 || nsq > r_max_) ++norm_warnings_;  // soft contract: log, don't reject

    ring_.push_back(nsq);
    window_mass_ += nsq;
    while (static_cast<std::int64_t>(ring_.size()) > n_) {
        window_mass_ -= ring_.front();
        ring_.pop_front();
    }

    for (int j = 0; j < levels(); ++j) {
        // expiry: drop everything that slid out of the window
        while (combined_len(j) > 0 && front_t(j) <= i - n_) pop_front(j);

        if (nsq >= levels_[j].theta()) {
            // segment-start convention matches snapshots: the entry covers the
            // stretch since the previous queue entry ended
            heavy_[j].push_back(HeavyRow{a, tail_t(j) + 1, i});  // stored verbatim
        } else if (amplified_) {
            levels_[j].update_amplified(a, i);
        } else {
            levels_[j].update(a, i);
        }

        // length cap: evict from the front even if unexpired
        while (combined_len(j) > cap_) pop_front(j);
    }
    clock_ = i;
}

MlQueryResult MlState::query() const {
    if (clock_ == 0) throw InvalidInput("MlState: query before any update");
    const std::int64_t t_now = clock_;
    const std::int64_t wstart = t_now - n_;           // window is (wstart, t_now]
    const std::int64_t head = std::max<std::int64_t>(wstart + 1, 1);

    MlQueryResult out;
    int pick = -1;
    for (int j = 0; j < levels(); ++j) {
        if (combined_len(j) == 0) continue;
        const std::int64_t s0 = front_s(j);
        if (s0 >= 1 && s0 <= head) { pick = j; break; }
    }
    if (pick < 0) {
        // no level's retained history reaches the window head: pick the level
        // whose threshold brackets the tracked window mass
        out.fallback = true;
        double guess = 0.0;
        if (window_mass_ > 0.0)
            guess = std::floor(std::log2(window_mass_ / static_cast<double>(n_)));
        pick = static_cast<int>(std::clamp(guess, 0.0, static_cast<double>(levels() - 1)));
    }
    out.level = pick;

    const AeroState& lv = levels_[pick];
    const std::int64_t lb = std::max<std::int64_t>(wstart, 0);
    Matrix base = Matrix::Zero(ell_, d_);
    if (lv.clock() > lb) base = lv.query(lb, lv.clock());
    for (const Snapshot& s : lv.snaps())
        if (s.t > wstart && s.t <= t_now) out.xi_sum += s.z.cols();

    // merge: stack the level answer with the in-window heavy rows, then one
    // more shrink back down to ell rows
    std::vector<const HeavyRow*> hv;
    for (const HeavyRow& h : heavy_[pick])
        if (h.t > wstart && h.t <= t_now) hv.push_back(&h);
    out.heavy_used = static_cast<int>(hv.size());

    Matrix stack(base.rows() + static_cast<Eigen::Index>(hv.size()), d_);
    stack.topRows(base.rows()) = base;
    for (std::size_t r = 0; r < hv.size(); ++r)
        stack.row(base.rows() + static_cast<Eigen::Index>(r)) = hv[r]->row.transpose();
    out.sketch = shrink_to_sketch(stack.transpose() * stack, ell_);
    return out;
}

std::int64_t MlState::stored_floats() const {
    std::int64_t total = static_cast<std::int64_t>(ring_.size());
    for (int j = 0; j < levels(); ++j) {
        total += levels_[j].residual().size();
        for (const Snapshot& s : levels_[j].snaps()) total += s.z.size() + s.m.size();
        total += static_cast<std::int64_t>(heavy_[j].size()) * d_;
    }
    return total;
}

}  // namespace aero
