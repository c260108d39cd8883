//
// Project     : aerosketch
// Module      : bench.cpp
// Description : benchmark scenarios, exact-oracle probes, CSV metrics output
//

#include "aero/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "aero/amm.hpp"
#include "aero/attp.hpp"
#include "aero/distributed.hpp"
#include "aero/oracle.hpp"
#include "aero/sliding_window.hpp"

namespace aero {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

std::vector<StreamRecord> make_stream(const RunConfig& config, std::uint64_t substream, int dim) {
    std::vector<StreamRecord> stream;
    if (config.input_path) {
        stream = load_stream(*config.input_path, config.input_format);
        if (!stream.empty() && stream.front().vec.size() != dim)
            throw InvalidInput("input stream dimension does not match --dim");
        if (config.rows > 0 && static_cast<std::int64_t>(stream.size()) > config.rows)
            stream.resize(config.rows);
    } else {
        GenSpec spec;
        spec.kind = config.gen_kind;
        spec.rows = config.rows;
        spec.dim = dim;
        spec.zeta = config.zeta;
        spec.seed = config.seed;
        spec.stream = kDataStreamBase + substream;
        stream = (spec.kind == GenKind::UniformRandom) ? gen_uniform(spec) : gen_noisy(spec);
    }
    if (stream.empty()) throw InvalidInput("empty input stream");
    if (config.normalize) normalize_stream(stream);
    return stream;
}

std::int64_t aero_state_floats(const AeroState& s) {
    std::int64_t total = s.residual().size();
    for (const Snapshot& snap : s.snaps()) total += snap.z.size() + snap.m.size();
    return total;
}

std::int64_t aero_state_rows(const AeroState& s) {
    std::int64_t total = s.residual().rows();
    for (const Snapshot& snap : s.snaps()) total += 2 * snap.z.cols();
    return total;
}

struct Peaks {
    std::int64_t rows = 0;
    std::int64_t floats = 0;
    void track(std::int64_t r, std::int64_t f) {
        rows = std::max(rows, r);
        floats = std::max(floats, f);
    }
};

MetricsReport probe_row(std::int64_t step, std::optional<double> error, const Peaks& peaks,
                        std::int64_t cum_ns, std::int64_t comm_bytes = 0,
                        std::optional<int> level = std::nullopt) {
    MetricsReport r;
    r.step = step;
    r.empirical_error = error;
    r.sketch_rows = peaks.rows;
    r.sketch_bytes = 8 * peaks.floats;
    r.cum_update_ns = cum_ns;
    r.amortized_update_ns = cum_ns / step;
    r.comm_bytes = comm_bytes;
    r.level_selected = level;
    return r;
}

std::vector<MetricsReport> run_fd(const RunConfig& config) {
    const auto stream = make_stream(config, 0, config.dim);
    const int ell = static_cast<int>(std::ceil(2.0 / config.eps));
    FdStream fd(config.dim, ell);
    OracleGram oracle(config.dim, std::nullopt, config.oracle_cap);

    std::vector<MetricsReport> out;
    Peaks peaks;
    std::int64_t cum_ns = 0;
    for (const StreamRecord& rec : stream) {
        const auto start = Clock::now();
        fd.insert(rec.vec);
        cum_ns += elapsed_ns(start);
        oracle.add(rec.vec, rec.t);
        peaks.track(2 * ell, fd.sketch().size());
        if (rec.t % config.query_every == 0
            || rec.t == static_cast<std::int64_t>(stream.size())) {
            std::optional<double> err;
            try { err = oracle.error(fd.sketch()); } catch (const OracleCapExceeded&) {}
            out.push_back(probe_row(rec.t, err, peaks, cum_ns));
        }
    }
    return out;
}

std::vector<MetricsReport> run_attp(const RunConfig& config) {
    const auto stream = make_stream(config, 0, config.dim);
    OracleGram oracle(config.dim, std::nullopt, config.oracle_cap);
    std::vector<MetricsReport> out;
    Peaks peaks;
    std::int64_t cum_ns = 0;

    if (config.baseline_svd) {
        BaselineSvdSketch sk(config.dim, config.eps, 0.0);
        double mass = 0.0;
        for (const StreamRecord& rec : stream) {
            const auto start = Clock::now();
            mass += rec.vec.squaredNorm();
            sk.set_theta(config.eps * mass);
            sk.update(rec.vec, rec.t);
            cum_ns += elapsed_ns(start);
            oracle.add(rec.vec, rec.t);
            std::int64_t floats = sk.residual().size();
            std::int64_t rows = sk.residual().rows();
            for (const Snapshot& s : sk.snaps()) {
                floats += s.z.size() + s.m.size();
                rows += 2 * s.z.cols();
            }
            peaks.track(rows, floats);
            if (rec.t % config.query_every == 0) {
                std::optional<double> err;
                try { err = oracle.error(sk.query(0, rec.t)); }
                catch (const OracleCapExceeded&) {}
                out.push_back(probe_row(rec.t, err, peaks, cum_ns));
            }
        }
        return out;
    }

    AttpState sk(config.dim, config.eps, RngState(config.seed, kSketchStreamBase), config.delta);
    for (const StreamRecord& rec : stream) {
        const auto start = Clock::now();
        sk.update(rec.vec, rec.t);
        cum_ns += elapsed_ns(start);
        oracle.add(rec.vec, rec.t);
        peaks.track(aero_state_rows(sk.inner()), aero_state_floats(sk.inner()));
        if (rec.t % config.query_every == 0) {
            std::optional<double> err;
            try { err = oracle.error(sk.query(rec.t)); } catch (const OracleCapExceeded&) {}
            out.push_back(probe_row(rec.t, err, peaks, cum_ns));
        }
    }
    return out;
}

std::vector<MetricsReport> run_sw(const RunConfig& config) {
    if (config.window < 1) throw InvalidInput("sw scenario requires --window");
    if (config.r_max < 1.0) throw InvalidInput("sw scenario requires --rmax >= 1");
    const auto stream = make_stream(config, 0, config.dim);
    MlState sk(config.dim, config.window, config.r_max, config.eps,
               RngState(config.seed, kSketchStreamBase), config.delta);
    OracleGram oracle(config.dim, config.window, config.oracle_cap);

    std::vector<MetricsReport> out;
    Peaks peaks;
    std::int64_t cum_ns = 0;
    for (const StreamRecord& rec : stream) {
        const auto start = Clock::now();
        sk.update(rec.vec, rec.t);
        cum_ns += elapsed_ns(start);
        oracle.add(rec.vec, rec.t);
        std::int64_t rows = 0;
        for (int j = 0; j < sk.levels(); ++j) {
            rows += aero_state_rows(sk.level_state(j));
            rows += static_cast<std::int64_t>(sk.heavy(j).size());
        }
        peaks.track(rows, sk.stored_floats());
        if (rec.t % config.query_every == 0) {
            const MlQueryResult q = sk.query();
            std::optional<double> err;
            try { err = oracle.error(q.sketch); } catch (const OracleCapExceeded&) {}
            out.push_back(probe_row(rec.t, err, peaks, cum_ns, 0, q.level));
        }
    }
    return out;
}

std::vector<MetricsReport> run_amm(const RunConfig& config) {
    if (config.window < 1) throw InvalidInput("amm scenario requires --window");
    const int dy = config.dim_y > 0 ? config.dim_y : config.dim;
    const auto xs = make_stream(config, 0, config.dim);
    const auto ys = make_stream(config, 1, dy);
    if (xs.size() != ys.size()) throw InvalidInput("amm: stream length mismatch");

    const double theta = config.eps * static_cast<double>(config.window);
    CodState sk(config.dim, dy, config.eps, theta, config.window,
                RngState(config.seed, kSketchStreamBase));
    OracleProduct oracle(config.dim, dy, config.window, config.oracle_cap);

    std::vector<MetricsReport> out;
    Peaks peaks;
    std::int64_t cum_ns = 0;
    for (std::size_t idx = 0; idx < xs.size(); ++idx) {
        const std::int64_t t = xs[idx].t;
        const auto start = Clock::now();
        sk.update(xs[idx].vec, ys[idx].vec, t);
        cum_ns += elapsed_ns(start);
        oracle.add(xs[idx].vec, ys[idx].vec, t);
        peaks.track(sk.a().cols() + 2 * static_cast<std::int64_t>(sk.snaps().size()),
                    sk.stored_floats());
        if (t % config.query_every == 0) {
            const auto [astar, bstar] = sk.query();
            std::optional<double> err;
            try { err = oracle.error(astar, bstar); } catch (const OracleCapExceeded&) {}
            out.push_back(probe_row(t, err, peaks, cum_ns));
        }
    }
    return out;
}

std::vector<MetricsReport> run_dist(const RunConfig& config, bool window_mode) {
    if (config.sites < 1) throw InvalidInput("dist scenario requires --sites >= 1");
    if (window_mode && config.window < 1) throw InvalidInput("dist-sw requires --window");
    SimConfig sim;
    sim.m = config.sites;
    sim.d = config.dim;
    sim.eps = config.eps;
    if (window_mode) sim.window = config.window;
    sim.query_every = config.query_every;
    sim.oracle_cap = config.oracle_cap;
    sim.seed = config.seed;
    for (int j = 0; j < config.sites; ++j)
        sim.site_streams.push_back(make_stream(config, static_cast<std::uint64_t>(j), config.dim));
    return run_simulation(sim).probes;
}

}  // namespace

std::vector<MetricsReport> run_scenario(const RunConfig& config) {
    if (config.dim < 1) throw InvalidInput("run_scenario: --dim must be >= 1");
    if (!(config.eps > 0.0 && config.eps <= 1.0))
        throw InvalidInput("run_scenario: --eps out of (0,1]");
    if (!config.input_path && config.rows < 1)
        throw InvalidInput("run_scenario: --rows required with --gen");
    if (config.query_every < 1) throw InvalidInput("run_scenario: --query-every must be >= 1");
    if (config.baseline_svd && config.scenario != Scenario::Attp)
        throw InvalidInput("run_scenario: --baseline svd supports the attp scenario only");

    std::vector<MetricsReport> reports;
    switch (config.scenario) {
        case Scenario::Fd: reports = run_fd(config); break;
        case Scenario::Attp: reports = run_attp(config); break;
        case Scenario::Sw: reports = run_sw(config); break;
        case Scenario::Amm: reports = run_amm(config); break;
        case Scenario::Dist: reports = run_dist(config, false); break;
        case Scenario::DistSw: reports = run_dist(config, true); break;
    }
    if (config.out_path) write_csv(reports, *config.out_path);
    return reports;
}

std::string csv_line(const MetricsReport& r) {
    char buf[64];
    std::string line = std::to_string(r.step) + ",";
    if (r.empirical_error) {
        std::snprintf(buf, sizeof buf, "%.17g", *r.empirical_error);
        line += buf;
    }
    line += "," + std::to_string(r.sketch_rows);
    line += "," + std::to_string(r.sketch_bytes);
    line += "," + std::to_string(r.amortized_update_ns);
    line += "," + std::to_string(r.comm_bytes);
    line += ",";
    if (r.level_selected) line += std::to_string(*r.level_selected);
    return line;
}

void write_csv(const std::vector<MetricsReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path);
    out << kCsvHeader << "\n";
    for (const MetricsReport& r : reports) out << csv_line(r) << "\n";
    if (!out) throw FormatError("write failure on " + path);
}

BaselineSvdSketch::BaselineSvdSketch(int d, double eps, double theta)
    : d_(d), eps_(eps), ell_(0), theta_(theta), c_(Matrix(0, d)),
      clock_(0), last_dump_t_(0), reduces_(0) {
    if (d < 1) throw InvalidInput("BaselineSvdSketch: d must be >= 1");
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("BaselineSvdSketch: eps out of (0,1]");
    ell_ = static_cast<int>(std::ceil(2.0 / eps));
}

void BaselineSvdSketch::update(const Vector& a, std::int64_t i) {
    if (a.size() != d_) throw InvalidInput("BaselineSvdSketch: row dimension mismatch");
    if (i <= clock_) throw InvalidInput("BaselineSvdSketch: timestamp regression");

    Matrix cprime(c_.rows() + 1, d_);
    cprime.topRows(c_.rows()) = c_;
    cprime.row(c_.rows()) = a.transpose();
    if (cprime.rows() == 2 * static_cast<Eigen::Index>(ell_)) {
        cprime = fd_reduce(cprime, ell_).topRows(std::max(ell_ - 1, 1)).eval();
        ++reduces_;
    }

    // exact per-update factorization (no randomized gate)
    const SvdResult fac = svd(cprime);
    int xi = 0;
    for (Eigen::Index j = 0; j < fac.sigma.size(); ++j) {
        if (fac.sigma(j) * fac.sigma(j) >= theta_ && theta_ > 0.0) xi = static_cast<int>(j) + 1;
        else break;
    }
    if (xi >= 1) {
        Snapshot snap;
        snap.z = fac.vt.topRows(xi).transpose();
        snap.m = (cprime * snap.z).transpose() * cprime;
        snap.s = last_dump_t_ + 1;
        snap.t = i;
        snap.theta = theta_;
        last_dump_t_ = i;
        c_ = cprime - (cprime * snap.z) * snap.z.transpose();
        snaps_.push_back(std::move(snap));
    } else {
        c_ = std::move(cprime);
    }
    clock_ = i;
}

Matrix BaselineSvdSketch::query(std::int64_t lb, std::int64_t ub) const {
    if (lb >= ub) throw InvalidInput("BaselineSvdSketch: query needs lb < ub");
    if (ub > clock_) throw InvalidInput("BaselineSvdSketch: query beyond clock");
    Matrix b = Matrix::Zero(d_, d_);
    if (ub == clock_ && c_.rows() > 0) b = c_.transpose() * c_;
    for (const Snapshot& s : snaps_)
        if (s.t > lb && s.t <= ub) b += restore_contribution(s);
    return shrink_to_sketch(b, ell_);
}

}  // namespace aero
