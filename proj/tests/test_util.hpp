//
// Project     : aerosketch
// Module      : test_util.hpp
// Description : shared helpers for the unit tests
//

#ifndef AERO_TESTS_TEST_UTIL_HPP
#define AERO_TESTS_TEST_UTIL_HPP

#include <cstdint>

#include "aero/linalg.hpp"
#include "aero/rng.hpp"

namespace aero_test {

inline aero::Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                             std::uint64_t stream = 0) {
    aero::RngState rng(seed, stream);
    aero::Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
    return m;
}

inline aero::Vector gaussian_vec(Eigen::Index n, std::uint64_t seed, std::uint64_t stream = 0) {
    aero::RngState rng(seed, stream);
    aero::Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.gaussian();
    return v;
}

// random d x k matrix with orthonormal columns
inline aero::Matrix orthonormal(Eigen::Index d, Eigen::Index k, std::uint64_t seed) {
    return aero::qr(gaussian(d, k, seed)).first;
}

inline double rel_fro(const aero::Matrix& got, const aero::Matrix& want) {
    const double denom = want.norm();
    return denom > 0.0 ? (got - want).norm() / denom : (got - want).norm();
}

}  // namespace aero_test

#endif  // AERO_TESTS_TEST_UTIL_HPP
