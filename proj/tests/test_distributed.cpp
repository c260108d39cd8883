//
// Project     : aerosketch
// Module      : test_distributed.cpp
// Description : coordinator/sites protocol, message accounting, simulator
//

#include <doctest.h>

#include <cmath>
#include <vector>

#include "aero/attp.hpp"
#include "aero/distributed.hpp"
#include "aero/oracle.hpp"
#include "test_util.hpp"

using namespace aero;
using aero_test::gaussian;
using aero_test::orthonormal;

namespace {

Message snapshot_msg(int from, std::int64_t t, const Matrix& z, const Matrix& m) {
    Message msg;
    msg.kind = MsgKind::SnapshotUpdate;
    msg.from = from;
    msg.z = z;
    msg.m = m;
    msg.t = t;
    return msg;
}

}  // namespace

TEST_CASE("message byte accounting matches the payload") {
    Message fm;
    fm.kind = MsgKind::FroMass;
    CHECK(fm.bytes() == 24);  // one float plus the header

    const int d = 6, xi = 2;
    const Message sm = snapshot_msg(0, 1, Matrix::Zero(d, xi), Matrix::Zero(xi, d));
    CHECK(sm.bytes() == 8 * (d * xi + xi * d) + 16);
}

TEST_CASE("the first row always triggers a mass report") {
    SiteState site(0, 4, 0.5, 2, RngState(1, 1000));
    std::vector<Message> outbox;
    site.update(Vector::Ones(4), 1, outbox);
    REQUIRE(!outbox.empty());
    CHECK(outbox.front().kind == MsgKind::FroMass);
    CHECK(outbox.front().f == doctest::Approx(4.0));
}

TEST_CASE("the coordinator broadcasts only after hearing from m reporters") {
    CoordinatorState coord(4, 2, false);
    Message fm;
    fm.kind = MsgKind::FroMass;
    fm.from = 0;
    fm.f = 3.0;
    CHECK(!coord.receive(fm).has_value());
    fm.from = 1;
    fm.f = 2.0;
    const auto bc = coord.receive(fm);
    REQUIRE(bc.has_value());
    CHECK(bc->kind == MsgKind::FroBroadcast);
    CHECK(bc->f == doctest::Approx(5.0));
    CHECK(coord.broadcasts() == 1);
}

TEST_CASE("with a single site every mass report broadcasts") {
    CoordinatorState coord(4, 1, false);
    Message fm;
    fm.kind = MsgKind::FroMass;
    fm.from = 0;
    fm.f = 1.0;
    for (int i = 0; i < 3; ++i) CHECK(coord.receive(fm).has_value());
    CHECK(coord.broadcasts() == 3);
}

TEST_CASE("snapshot delivery adds the restoration contribution to the accumulator") {
    const int d = 6, xi = 2;
    const Matrix z = orthonormal(d, xi, 3);
    const Matrix m = gaussian(xi, d, 4);
    CoordinatorState coord(d, 1, false);
    coord.receive(snapshot_msg(0, 1, z, m));
    Snapshot snap;
    snap.z = z;
    snap.m = m;
    CHECK((coord.b() - restore_contribution(snap)).norm() < 1e-12);
}

TEST_CASE("contributions from different sites add up") {
    const int d = 5;
    CoordinatorState coord(d, 2, false);
    const Matrix z0 = orthonormal(d, 1, 5), m0 = gaussian(1, d, 6);
    const Matrix z1 = orthonormal(d, 2, 7), m1 = gaussian(2, d, 8);
    coord.receive(snapshot_msg(0, 1, z0, m0));
    coord.receive(snapshot_msg(1, 1, z1, m1));
    Snapshot s0{z0, m0, 0, 0, 0.0}, s1{z1, m1, 0, 0, 0.0};
    const Matrix want = restore_contribution(s0) + restore_contribution(s1);
    CHECK((coord.b() - want).norm() <= 1e-8 * std::max(1.0, want.norm()));
}

TEST_CASE("expiry removes exactly the cached contribution") {
    const int d = 4;
    CoordinatorState coord(d, 1, true);
    const Matrix z = orthonormal(d, 1, 9);
    const Matrix m = gaussian(1, d, 10);
    coord.receive(snapshot_msg(0, 7, z, m));
    CHECK(coord.b().norm() > 0.0);
    Message ex;
    ex.kind = MsgKind::Expire;
    ex.from = 0;
    ex.t = 7;
    coord.receive(ex);
    CHECK(coord.b().norm() < 1e-12);
    CHECK(coord.contributions().empty());
    CHECK_THROWS_AS(coord.receive(ex), ProtocolError);  // already gone
}

TEST_CASE("protocol violations are rejected") {
    CoordinatorState coord(4, 1, false);
    Message ex;
    ex.kind = MsgKind::Expire;
    ex.t = 1;
    CHECK_THROWS_AS(coord.receive(ex), ProtocolError);  // expiry without a window

    Message neg;
    neg.kind = MsgKind::FroMass;
    neg.f = -1.0;
    CHECK_THROWS_AS(coord.receive(neg), ProtocolError);  // negative whole-stream mass

    Message bad = snapshot_msg(0, 1, Matrix::Zero(4, 2), Matrix::Zero(3, 4));
    CHECK_THROWS_AS(coord.receive(bad), ProtocolError);  // inconsistent shapes

    Message bc;
    bc.kind = MsgKind::FroBroadcast;
    CHECK_THROWS_AS(coord.receive(bc), ProtocolError);  // wrong direction
}

TEST_CASE("a windowed site expires each shipped snapshot exactly once") {
    const std::int64_t n = 10;
    SiteState site(0, 4, 1.0, 1, RngState(11, 1000), n);
    std::vector<Message> outbox;
    site.on_broadcast(100.0);  // theta = eps * window mass; make the dump certain
    site.update(50.0 * Vector::Unit(4, 0), 1, outbox);
    int snaps = 0;
    for (const Message& m : outbox)
        if (m.kind == MsgKind::SnapshotUpdate) ++snaps;
    REQUIRE(snaps == 1);
    int expires = 0;
    for (std::int64_t i = 2; i <= n + 2; ++i) {
        outbox.clear();
        site.update(0.01 * Vector::Ones(4), i, outbox);
        for (const Message& m : outbox)
            if (m.kind == MsgKind::Expire && m.t == 1) ++expires;
    }
    CHECK(expires == 1);
}

TEST_CASE("a single-site simulation reproduces the standalone persistent sketch") {
    const int d = 8;
    const double eps = 0.25;
    const std::uint64_t seed = 5;
    GenSpec spec;
    spec.rows = 300;
    spec.dim = d;
    spec.seed = seed;
    spec.stream = 0;
    SimConfig sim;
    sim.m = 1;
    sim.d = d;
    sim.eps = eps;
    sim.query_every = 50;
    sim.seed = seed;
    sim.site_streams.push_back(gen_uniform(spec));
    const SimResult res = run_simulation(sim);

    AttpState attp(d, eps, RngState(seed, kSketchStreamBase));
    OracleGram oracle(d, std::nullopt, 50000);
    std::size_t probe = 0;
    for (const StreamRecord& rec : sim.site_streams.front()) {
        attp.update(rec.vec, rec.t);
        oracle.add(rec.vec, rec.t);
        if (rec.t % 50 == 0) {
            REQUIRE(probe < res.probes.size());
            REQUIRE(res.probes[probe].empirical_error.has_value());
            const double want = oracle.error(attp.query(rec.t));
            CHECK(*res.probes[probe].empirical_error == want);  // bit-for-bit
            ++probe;
        }
    }
    CHECK(probe == res.probes.size());
}

TEST_CASE("the simulator is deterministic and its traffic counter is monotone") {
    GenSpec spec;
    spec.rows = 200;
    spec.dim = 6;
    spec.seed = 3;
    SimConfig sim;
    sim.m = 2;
    sim.d = 6;
    sim.eps = 0.5;
    sim.query_every = 25;
    sim.seed = 3;
    for (int j = 0; j < 2; ++j) {
        spec.stream = static_cast<std::uint64_t>(j);
        sim.site_streams.push_back(gen_uniform(spec));
    }
    const SimResult r1 = run_simulation(sim);
    const SimResult r2 = run_simulation(sim);
    REQUIRE(r1.probes.size() == r2.probes.size());
    std::int64_t prev = 0;
    for (std::size_t i = 0; i < r1.probes.size(); ++i) {
        CHECK(*r1.probes[i].empirical_error == *r2.probes[i].empirical_error);
        CHECK(r1.probes[i].comm_bytes >= prev);
        prev = r1.probes[i].comm_bytes;
    }
    CHECK(r1.comm_bytes == r2.comm_bytes);
    CHECK(r1.broadcasts == r2.broadcasts);
}

TEST_CASE("the simulator validates its configuration") {
    SimConfig sim;
    sim.m = 0;
    CHECK_THROWS_AS(run_simulation(sim), InvalidInput);
    sim.m = 2;
    sim.d = 4;
    sim.eps = 0.5;
    sim.site_streams.resize(1);  // one stream for two sites
    CHECK_THROWS_AS(run_simulation(sim), InvalidInput);
}
