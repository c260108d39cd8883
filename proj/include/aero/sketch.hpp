//
// Project     : aerosketch
// Module      : sketch.hpp
// Description : single-level streaming covariance sketch with snapshot dump,
//               exact restoration, and optional probability amplification
//

#ifndef AERO_SKETCH_HPP
#define AERO_SKETCH_HPP

#include <cstdint>
#include <deque>
#include <optional>

#include "aero/fd.hpp"
#include "aero/linalg.hpp"
#include "aero/rng.hpp"

namespace aero {

// a timestamped factored record of mass removed from the residual buffer;
// residual Gram plus restore_contribution(snap) reconstructs the pre-dump
// Gram exactly for any orthonormal z
struct Snapshot {
    Matrix z;        // d x xi, orthonormal columns
    Matrix m;        // xi x d, z^T C'^T C' (computed before the residual subtraction)
    std::int64_t s;  // start timestamp of the covered segment
    std::int64_t t;  // dump timestamp
    double theta;    // threshold in force at dump time (audit)
};

// per-update instrumentation counters (reset at each update)
struct UpdateStats {
    int doubling_steps = 0;   // ranks tried in the doubling loop
    int simul_calls = 0;      // simul_iter invocations
    bool gate_fired = false;  // power-iteration gate passed
    bool dumped = false;      // a snapshot was enqueued
    bool reduced = false;     // a Frequent Directions reduce fired
};

// single-level sketch state; one writer per state
class AeroState {
  public:
    // eps in (0,1]; theta >= 0 (Frobenius-squared units); delta, if given,
    // enables probability amplification and must lie in (0, 1/100)
    AeroState(int d, double eps, double theta, RngState rng,
              std::optional<double> delta = std::nullopt);

    // absorb row `a` at timestamp `i` (must be > clock); may fire one
    // Frequent Directions reduce and/or enqueue one snapshot
    void update(const Vector& a, std::int64_t i);

    // as update, but the accepted-rank factorization is amplified: r
    // candidates at eps_si = 0.2, residual of each estimated by s power
    // iterations (max over s), candidate with the smallest estimate kept
    void update_amplified(const Vector& a, std::int64_t i);

    // sketch of the rows with timestamps in (lb, ub]: restores the in-range
    // snapshot contributions, adds the live residual Gram when ub == clock,
    // shrinks by the ell-th eigenvalue; returns an ell x d matrix
    Matrix query(std::int64_t lb, std::int64_t ub) const;

    // accessors
    int d() const { return d_; }
    int ell() const { return ell_; }
    double eps() const { return eps_; }
    double theta() const { return theta_; }
    void set_theta(double theta);
    std::int64_t clock() const { return clock_; }
    const Matrix& residual() const { return c_; }
    std::deque<Snapshot>& snaps() { return snaps_; }
    const std::deque<Snapshot>& snaps() const { return snaps_; }
    const UpdateStats& last_update_stats() const { return stats_; }

    // eps_si used by the plain (non-amplified) doubling factorization;
    // default 0.4, exposed for the amplification-consistency contract
    double eps_si() const { return eps_si_; }
    void set_eps_si(double v);

    // timestamp of the most recent dump ever (survives queue pops)
    std::int64_t last_dump_time() const { return last_dump_t_; }

  private:
    void update_impl(const Vector& a, std::int64_t i, bool amplified);
    SimulIterResult factorize(const Matrix& at, int k, bool amplified);

    int d_;
    double eps_;
    int ell_;
    double theta_;
    double eps_si_;
    std::optional<double> delta_;
    Matrix c_;  // residual buffer, row count <= 2*ell
    std::deque<Snapshot> snaps_;
    std::int64_t clock_;
    std::int64_t last_dump_t_;
    RngState rng_;
    UpdateStats stats_;
};

// ZM + M^T Z^T - Z (M Z) Z^T for a snapshot (d x d, symmetric)
Matrix restore_contribution(const Snapshot& snap);

// shared query-side reconstruction: eigendecompose symmetric `b`, clamp
// eigenvalues at zero, shrink by the ell-th one, return sqrt-scaled top-ell
// rows of V^T (ell x d)
Matrix shrink_to_sketch(const Matrix& b, int ell);

}  // namespace aero

#endif  // AERO_SKETCH_HPP
