//
// Project     : aerosketch
// Module      : oracle.hpp
// Description : exact brute-force reference values for benchmark probes
//

#ifndef AERO_ORACLE_HPP
#define AERO_ORACLE_HPP

#include <cstdint>
#include <deque>
#include <optional>

#include "aero/errors.hpp"
#include "aero/linalg.hpp"

namespace aero {

// exact Gram accumulator over a prefix or sliding window; once the held
// history exceeds the row cap the oracle stops tracking and every error
// request raises OracleCapExceeded (the caller omits the error column)
class OracleGram {
  public:
    OracleGram(int d, std::optional<std::int64_t> window, std::int64_t cap)
        : window_(window), cap_(cap), capped_(false), g_(Matrix::Zero(d, d)),
          mass_(0.0), rows_(0) {}

    void add(const Vector& row, std::int64_t t) {
        if (capped_) return;
        ++rows_;
        g_.noalias() += row * row.transpose();
        mass_ += row.squaredNorm();
        if (window_) {
            held_.push_back({t, row});
            while (!held_.empty() && held_.front().t + *window_ <= t) {
                const Vector& old = held_.front().row;
                g_.noalias() -= old * old.transpose();
                mass_ -= old.squaredNorm();
                held_.pop_front();
                --rows_;
            }
        }
        if (rows_ > cap_) capped_ = true;
    }

    bool capped() const { return capped_; }

    // relative covariance error ||G - B^T B||_2 / mass for a sketch B
    double error(const Matrix& sketch) const {
        require_exact();
        if (mass_ <= 0.0) return 0.0;
        return spectral_norm_sym(g_ - sketch.transpose() * sketch) / mass_;
    }

    // error of a Gram-shaped reconstruction
    double error_gram(const Matrix& gram_hat) const {
        require_exact();
        if (mass_ <= 0.0) return 0.0;
        return spectral_norm_sym(g_ - gram_hat) / mass_;
    }

    const Matrix& gram() const { require_exact(); return g_; }
    double mass() const { require_exact(); return mass_; }
    std::int64_t rows() const { return rows_; }

  private:
    void require_exact() const {
        if (capped_) throw OracleCapExceeded("oracle row cap exceeded");
    }

    struct Held { std::int64_t t; Vector row; };
    std::optional<std::int64_t> window_;
    std::int64_t cap_;
    bool capped_;
    Matrix g_;
    double mass_;
    std::int64_t rows_;
    std::deque<Held> held_;
};

// exact cross-product accumulator for the matrix-multiplication scenario
class OracleProduct {
  public:
    OracleProduct(int d_x, int d_y, std::optional<std::int64_t> window, std::int64_t cap)
        : window_(window), cap_(cap), capped_(false), g_(Matrix::Zero(d_x, d_y)),
          mass_x_(0.0), mass_y_(0.0), rows_(0) {}

    void add(const Vector& x, const Vector& y, std::int64_t t) {
        if (capped_) return;
        ++rows_;
        g_.noalias() += x * y.transpose();
        mass_x_ += x.squaredNorm();
        mass_y_ += y.squaredNorm();
        if (window_) {
            held_.push_back({t, x, y});
            while (!held_.empty() && held_.front().t + *window_ <= t) {
                const auto& old = held_.front();
                g_.noalias() -= old.x * old.y.transpose();
                mass_x_ -= old.x.squaredNorm();
                mass_y_ -= old.y.squaredNorm();
                held_.pop_front();
                --rows_;
            }
        }
        if (rows_ > cap_) capped_ = true;
    }

    bool capped() const { return capped_; }

    // ||G - a* b*^T||_2 / (||X||_F ||Y||_F)
    double error(const Matrix& astar, const Matrix& bstar) const {
        if (capped_) throw OracleCapExceeded("oracle row cap exceeded");
        const double denom = std::sqrt(mass_x_) * std::sqrt(mass_y_);
        if (denom <= 0.0) return 0.0;
        return spectral_norm(g_ - astar * bstar.transpose()) / denom;
    }

    const Matrix& product() const { return g_; }
    double denom() const { return std::sqrt(mass_x_) * std::sqrt(mass_y_); }

  private:
    struct Held { std::int64_t t; Vector x, y; };
    std::optional<std::int64_t> window_;
    std::int64_t cap_;
    bool capped_;
    Matrix g_;
    double mass_x_, mass_y_;
    std::int64_t rows_;
    std::deque<Held> held_;
};

}  // namespace aero

#endif  // AERO_ORACLE_HPP
