//
// Project     : aerosketch
// Module      : test_attp.cpp
// Description : persistent prefix sketch: growing threshold, historical queries
//

#include <doctest.h>

#include <cmath>
#include <vector>

#include "aero/attp.hpp"
#include "aero/oracle.hpp"
#include "test_util.hpp"

using namespace aero;
using aero_test::gaussian_vec;

TEST_CASE("the threshold tracks the running mass") {
    AttpState s(4, 0.1, RngState(0, 0));
    s.update(Vector::Unit(4, 0), 1);  // unit norm
    CHECK(s.inner().theta() == doctest::Approx(0.1));
    CHECK(s.fro_mass() == doctest::Approx(1.0));
    s.update(2.0 * Vector::Unit(4, 1), 2);
    CHECK(s.fro_mass() == doctest::Approx(5.0));
    CHECK(s.inner().theta() == doctest::Approx(0.5));
}

TEST_CASE("the mass accumulator is exact over a long stream") {
    AttpState s(8, 0.5, RngState(1, 0));
    double mass = 0.0;
    for (int i = 1; i <= 500; ++i) {
        const Vector a = gaussian_vec(8, 40, i);
        mass += a.squaredNorm();
        s.update(a, i);
    }
    CHECK(std::abs(s.fro_mass() - mass) <= 1e-9 * mass);
    CHECK(s.inner().theta() == doctest::Approx(0.5 * mass));
}

TEST_CASE("queries validate the probe time") {
    AttpState s(4, 0.5, RngState(2, 0));
    s.update(Vector::Ones(4), 1);
    CHECK_THROWS_AS(s.query(0), InvalidInput);
    CHECK_THROWS_AS(s.query(2), InvalidInput);
}

TEST_CASE("historical answers never change under later updates") {
    AttpState s(8, 0.5, RngState(3, 0));
    for (int i = 1; i <= 300; ++i) s.update(gaussian_vec(8, 41, i), i);
    std::vector<std::int64_t> probes{50, 100, 200};
    std::vector<Matrix> before;
    for (auto t : probes) before.push_back(s.query(t));
    for (int i = 301; i <= 400; ++i) s.update(gaussian_vec(8, 41, i), i);
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const Matrix after = s.query(probes[p]);
        CHECK((after - before[p]).norm() == 0.0);  // bitwise stable
    }
}

TEST_CASE("prefix errors stay within the bound at every probe") {
    const int d = 8;
    const double eps = 0.25;
    AttpState s(d, eps, RngState(5, 6));
    std::vector<Vector> rows;
    RngState data(5, 0);
    for (int i = 1; i <= 400; ++i) {
        Vector a(d);
        for (int j = 0; j < d; ++j) a(j) = data.uniform();
        rows.push_back(a);
        s.update(a, i);
    }
    for (std::int64_t t : {100, 200, 300, 400}) {
        Matrix gram = Matrix::Zero(d, d);
        double mass = 0.0;
        for (std::int64_t i = 0; i < t; ++i) {
            gram.noalias() += rows[i] * rows[i].transpose();
            mass += rows[i].squaredNorm();
        }
        const Matrix b = s.query(t);
        CHECK(spectral_norm_sym(gram - b.transpose() * b) <= eps * mass);
    }
}

TEST_CASE("total snapshot width grows at most logarithmically in the mass") {
    const double eps = 0.25;
    AttpState s(16, eps, RngState(9, 2));
    for (int i = 1; i <= 2000; ++i) s.update(gaussian_vec(16, 43, i), i);
    std::int64_t xi_sum = 0;
    for (const Snapshot& snap : s.inner().snaps()) xi_sum += snap.z.cols();
    const double bound = 2.0 * (2.0 / eps) * std::log2(2.0 * s.fro_mass() / eps);
    CHECK(static_cast<double>(xi_sum) <= bound);
}

TEST_CASE("querying the present equals the full-prefix query") {
    AttpState s(8, 0.5, RngState(10, 0));
    for (int i = 1; i <= 60; ++i) s.update(gaussian_vec(8, 44, i), i);
    CHECK((s.query(s.clock()) - s.inner().query(0, s.clock())).norm() == 0.0);
}
