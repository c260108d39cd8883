//
// Project     : aerosketch
// Module      : amm.hpp
// Description : sliding-window approximate matrix multiplication sketch
//               (co-occurring directions with snapshot restoration) and the
//               adaptive-threshold wrapper
//

#ifndef AERO_AMM_HPP
#define AERO_AMM_HPP

#include <cstdint>
#include <deque>
#include <utility>

#include "aero/fd.hpp"
#include "aero/linalg.hpp"
#include "aero/rng.hpp"

namespace aero {

// factored record of product mass removed from the residual pair
struct CodSnapshot {
    Matrix z;    // d_x x xi, orthonormal
    Matrix h;    // d_y x xi, orthonormal
    Matrix zm;   // xi x d_y  = z^T A'B'^T
    Matrix mh;   // d_x x xi  = A'B'^T h
    std::int64_t s;
    std::int64_t t;
};

// restores z*zm + mh*h^T - z*(zm*h)*h^T (d_x x d_y)
Matrix cod_restore_contribution(const CodSnapshot& snap);

class CodState {
  public:
    // theta in product singular-value units (not squared); n = window size
    CodState(int d_x, int d_y, double eps, double theta, std::int64_t n, RngState rng);

    void update(const Vector& x, const Vector& y, std::int64_t i);

    // factor pair (a*: d_x x ell, b*: d_y x ell) approximating the window product
    std::pair<Matrix, Matrix> query() const;

    int d_x() const { return dx_; }
    int d_y() const { return dy_; }
    int ell() const { return ell_; }
    double theta() const { return theta_; }
    void set_theta(double theta);
    std::int64_t n() const { return n_; }
    std::int64_t clock() const { return clock_; }
    const Matrix& a() const { return a_; }
    const Matrix& b() const { return b_; }
    const std::deque<CodSnapshot>& snaps() const { return snaps_; }
    std::int64_t stored_floats() const;

  private:
    int dx_, dy_;
    double eps_;
    int ell_;
    double theta_;
    std::int64_t n_;
    Matrix a_;  // d_x x (<= 2*ell) residual columns
    Matrix b_;  // d_y x (same column count)
    std::deque<CodSnapshot> snaps_;
    std::int64_t clock_;
    std::int64_t last_dump_t_;
    RngState rng_;
};

// main/auxiliary pair with queue-length-driven threshold doubling/halving;
// the auxiliary sketch rebuilds from each window boundary and replaces the
// main one every n steps
class AdaptiveState {
  public:
    AdaptiveState(int d_x, int d_y, double eps, double theta0, std::int64_t n, RngState rng);

    void update(const Vector& x, const Vector& y, std::int64_t i);
    std::pair<Matrix, Matrix> query() const { return main_.query(); }

    int level() const { return level_; }
    const CodState& main() const { return main_; }
    const CodState& aux() const { return aux_; }

  private:
    double eps_;
    double theta0_;
    std::int64_t n_;
    int level_;
    CodState main_;
    CodState aux_;
    RngState rng_;
};

}  // namespace aero

#endif  // AERO_AMM_HPP
