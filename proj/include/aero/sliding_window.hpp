//
// Project     : aerosketch
// Module      : sliding_window.hpp
// Description : multi-level sliding-window covariance sketch with geometric
//               thresholds, heavy-row bypass, and expiry
//

#ifndef AERO_SLIDING_WINDOW_HPP
#define AERO_SLIDING_WINDOW_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "aero/sketch.hpp"

namespace aero {

// a row stored verbatim because its squared norm reached the level threshold
struct HeavyRow {
    Vector row;
    std::int64_t s;  // segment start: one past the previous queue entry's end
    std::int64_t t;  // arrival timestamp
};

struct MlQueryResult {
    Matrix sketch;        // ell x d
    int level = 0;        // level answering the query
    bool fallback = false;  // no level covered the window head; mass-based pick
    std::int64_t xi_sum = 0;  // sum of snapshot widths in-window at the level
    int heavy_used = 0;   // heavy rows merged into the answer
};

// L = ceil(log2(max(r_max,2))) parallel levels with thresholds 2^j*eps*n;
// rows with squared norm >= threshold bypass the level's sketch and are
// stored verbatim; one combined per-level queue (snapshots + heavy rows)
// obeys the expiry and length-cap pop rules
class MlState {
  public:
    MlState(int d, std::int64_t n, double r_max, double eps, RngState rng,
            std::optional<double> delta = std::nullopt);

    void update(const Vector& a, std::int64_t i);
    MlQueryResult query() const;

    int d() const { return d_; }
    int ell() const { return ell_; }
    int levels() const { return static_cast<int>(levels_.size()); }
    std::int64_t n() const { return n_; }
    std::int64_t clock() const { return clock_; }
    double theta(int j) const { return levels_[j].theta(); }
    double window_mass() const { return window_mass_; }
    std::int64_t norm_warnings() const { return norm_warnings_; }
    const AeroState& level_state(int j) const { return levels_[j]; }
    const std::deque<HeavyRow>& heavy(int j) const { return heavy_[j]; }

    // peak float count across all data structures (size accounting)
    std::int64_t stored_floats() const;

  private:
    std::int64_t combined_len(int j) const;
    std::int64_t front_t(int j) const;       // oldest entry timestamp, or max int
    std::int64_t front_s(int j) const;       // oldest entry start timestamp
    std::int64_t tail_t(int j) const;        // newest entry timestamp, or 0
    void pop_front(int j);

    int d_;
    std::int64_t n_;
    double r_max_;
    double eps_;
    int ell_;
    std::int64_t cap_;  // ceil(8/eps) combined-queue length cap
    bool amplified_;
    std::vector<AeroState> levels_;
    std::vector<std::deque<HeavyRow>> heavy_;
    std::int64_t clock_;
    std::deque<double> ring_;   // squared norms of the last n rows
    double window_mass_;
    std::int64_t norm_warnings_;
};

}  // namespace aero

#endif  // AERO_SLIDING_WINDOW_HPP
