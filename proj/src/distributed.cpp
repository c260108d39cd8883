//
// Project     : aerosketch
// Module      : distributed.cpp
// Description : coordinator/sites protocol and deterministic simulator
//

#include "aero/distributed.hpp"

#include <algorithm>
#include <chrono>

#include "aero/oracle.hpp"

namespace aero {

SiteState::SiteState(int id, int d, double eps, int m, RngState rng,
                     std::optional<std::int64_t> window)
    : id_(id), m_(m), eps_(eps), window_(window),
      inner_(d, eps, 0.0, rng),
      f_local_(0.0), f_self_sent_(0.0), f_hat_known_(0.0),
      w_local_(0.0), w_last_sent_(0.0) {
    if (id < 0) throw InvalidInput("SiteState: negative site id");
    if (m < 1) throw InvalidInput("SiteState: site count must be >= 1");
}

void SiteState::on_broadcast(double f_hat) {
    // whole-stream mass never decreases; window mass may
    f_hat_known_ = window_ ? f_hat : std::max(f_hat_known_, f_hat);
}

void SiteState::update(const Vector& a, std::int64_t i, std::vector<Message>& outbox) {
    const double nsq = a.squaredNorm();
    if (window_) {
        // sliding-window mode: the threshold must track the window mass,
        // not the whole stream, or sub-threshold stale mass accumulates.
        // Track it exactly and report deltas (possibly negative).
        ring_.push_back(nsq);
        w_local_ += nsq;
        while (static_cast<std::int64_t>(ring_.size()) > *window_) {
            w_local_ -= ring_.front();
            ring_.pop_front();
        }
        const double delta = w_local_ - w_last_sent_;
        if (std::abs(delta) >= (eps_ / m_) * f_hat_known_) {
            Message msg;
            msg.kind = MsgKind::FroMass;
            msg.from = id_;
            msg.f = delta;
            outbox.push_back(std::move(msg));
            w_last_sent_ = w_local_;
        }
        // threshold on the site's own window mass only: expired rows that
        // remain in the residual are pure error bounded by theta, so theta
        // must not scale with the pooled mass (which is m times larger)
        inner_.set_theta(eps_ * w_local_);
    } else {
        f_local_ += nsq;
        if (f_local_ >= (eps_ / m_) * f_hat_known_) {
            Message msg;
            msg.kind = MsgKind::FroMass;
            msg.from = id_;
            msg.f = f_local_;
            outbox.push_back(std::move(msg));
            f_self_sent_ += f_local_;
            f_local_ = 0.0;
        }
        // the site always knows its own exact mass; the broadcast estimate
        // only adds the other sites' contributions, so take the larger
        inner_.set_theta(eps_ * std::max(f_hat_known_, f_self_sent_ + f_local_));
    }
    inner_.update(a, i);

    // ship snapshots immediately; the local queue stays empty
    while (!inner_.snaps().empty()) {
        Snapshot snap = std::move(inner_.snaps().front());
        inner_.snaps().pop_front();
        Message msg;
        msg.kind = MsgKind::SnapshotUpdate;
        msg.from = id_;
        msg.z = std::move(snap.z);
        msg.m = std::move(snap.m);
        msg.t = snap.t;
        outbox.push_back(std::move(msg));
        if (window_) sent_snap_times_.push_back(snap.t);
    }

    // sliding-window mode: notify expiry of previously shipped snapshots
    if (window_) {
        while (!sent_snap_times_.empty() && sent_snap_times_.front() <= i - *window_) {
            Message msg;
            msg.kind = MsgKind::Expire;
            msg.from = id_;
            msg.t = sent_snap_times_.front();
            sent_snap_times_.pop_front();
            outbox.push_back(std::move(msg));
        }
    }
}

CoordinatorState::CoordinatorState(int d, int m, bool window_mode)
    : d_(d), m_(m), window_mode_(window_mode), b_(Matrix::Zero(d, d)),
      f_hat_(0.0), msg_count_(0), broadcasts_(0) {
    if (d < 1) throw InvalidInput("CoordinatorState: d must be >= 1");
    if (m < 1) throw InvalidInput("CoordinatorState: site count must be >= 1");
}

std::optional<Message> CoordinatorState::receive(const Message& msg) {
    switch (msg.kind) {
        case MsgKind::FroMass: {
            if (!window_mode_ && !(msg.f >= 0.0))
                throw ProtocolError("FroMass: negative mass");
            f_hat_ = std::max(f_hat_ + msg.f, 0.0);
            if (++msg_count_ >= m_) {
                msg_count_ = 0;
                ++broadcasts_;
                Message bc;
                bc.kind = MsgKind::FroBroadcast;
                bc.from = -1;
                bc.f = f_hat_;
                return bc;
            }
            return std::nullopt;
        }
        case MsgKind::SnapshotUpdate: {
            if (msg.z.cols() == 0 || msg.z.rows() != d_ || msg.m.rows() != msg.z.cols()
                || msg.m.cols() != d_)
                throw ProtocolError("SnapshotUpdate: inconsistent payload shapes");
            const Matrix zm = msg.z * msg.m;
            const Matrix contrib = zm + zm.transpose()
                                 - msg.z * (msg.m * msg.z) * msg.z.transpose();
            b_ += contrib;
            // contributions are cached in both modes: sliding-window expiry
            // subtracts them; probes replay them in timestamp order
            contributions_[{msg.from, msg.t}] = contrib;
            return std::nullopt;
        }
        case MsgKind::Expire: {
            if (!window_mode_) throw ProtocolError("Expire outside sliding-window mode");
            const auto it = contributions_.find({msg.from, msg.t});
            if (it == contributions_.end()) throw ProtocolError("Expire: unknown contribution");
            b_ -= it->second;
            contributions_.erase(it);
            return std::nullopt;
        }
        case MsgKind::FroBroadcast:
            throw ProtocolError("coordinator received a broadcast");
    }
    throw ProtocolError("unknown message kind");
}

Matrix CoordinatorState::query(int ell) const { return shrink_to_sketch(b_, ell); }

namespace {

// probe-time reconstruction: site residual Grams plus every live cached
// contribution replayed in (timestamp, site) order. For m=1 this reproduces
// a standalone sketch query operation-for-operation, which is what makes
// the single-site run bit-identical to the non-distributed path.
Matrix probe_gram(const CoordinatorState& coord, const std::vector<SiteState>& sites, int d) {
    Matrix b = Matrix::Zero(d, d);
    for (const SiteState& s : sites) {
        const Matrix& c = s.inner().residual();
        if (c.rows() > 0) b += c.transpose() * c;
    }
    std::vector<const std::pair<const std::pair<int, std::int64_t>, Matrix>*> live;
    for (const auto& kv : coord.contributions()) live.push_back(&kv);
    std::sort(live.begin(), live.end(), [](const auto* x, const auto* y) {
        if (x->first.second != y->first.second) return x->first.second < y->first.second;
        return x->first.first < y->first.first;
    });
    for (const auto* kv : live) b += kv->second;
    return b;
}

}  // namespace

SimResult run_simulation(const SimConfig& config) {
    if (config.m < 1) throw InvalidInput("run_simulation: m must be >= 1");
    if (static_cast<int>(config.site_streams.size()) != config.m)
        throw InvalidInput("run_simulation: one stream per site required");
    const std::size_t ticks = config.site_streams.front().size();
    for (const auto& s : config.site_streams) {
        if (s.size() != ticks) throw InvalidInput("run_simulation: unequal stream lengths");
        for (const StreamRecord& r : s)
            if (r.vec.size() != config.d)
                throw InvalidInput("run_simulation: stream dimension mismatch");
    }
    if (!(config.eps > 0.0 && config.eps <= 1.0))
        throw InvalidInput("run_simulation: eps out of (0,1]");

    const bool window_mode = config.window.has_value();
    const int ell = static_cast<int>(std::ceil(2.0 / config.eps));

    std::vector<SiteState> sites;
    for (int j = 0; j < config.m; ++j)
        sites.emplace_back(j, config.d, config.eps, config.m,
                           RngState(config.seed, kSketchStreamBase + j), config.window);
    CoordinatorState coord(config.d, config.m, window_mode);
    OracleGram oracle(config.d, config.window, config.oracle_cap);

    // pending deliveries: (ready tick, message); FIFO per channel
    std::deque<std::pair<std::int64_t, Message>> to_coord;
    std::deque<std::pair<std::int64_t, Message>> to_sites;  // broadcasts

    SimResult result;
    std::int64_t comm_bytes = 0;
    std::int64_t cum_ns = 0;
    std::int64_t peak_floats = 0;

    for (std::int64_t i = 1; i <= static_cast<std::int64_t>(ticks); ++i) {
        // deliver matured broadcasts before anyone processes this tick
        while (!to_sites.empty() && to_sites.front().first <= i) {
            for (SiteState& s : sites) s.on_broadcast(to_sites.front().second.f);
            to_sites.pop_front();
        }

        const auto start = std::chrono::steady_clock::now();
        std::vector<Message> outbox;
        for (int j = 0; j < config.m; ++j) {
            const Vector& row = config.site_streams[j][i - 1].vec;
            sites[j].update(row, i, outbox);
            oracle.add(row, i);
        }
        cum_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now() - start).count();

        for (Message& msg : outbox) {
            comm_bytes += msg.bytes();
            to_coord.emplace_back(i + config.latency, std::move(msg));
        }
        // deliver matured site->coordinator traffic at the tick boundary
        while (!to_coord.empty() && to_coord.front().first <= i) {
            std::optional<Message> bc = coord.receive(to_coord.front().second);
            to_coord.pop_front();
            if (bc) {
                comm_bytes += config.m * bc->bytes();  // one copy per site
                to_sites.emplace_back(i + 1 + config.latency, std::move(*bc));
            }
        }

        std::int64_t floats = coord.b().size();
        for (const auto& kv : coord.contributions()) floats += kv.second.size();
        for (const SiteState& s : sites) floats += s.inner().residual().size();
        peak_floats = std::max(peak_floats, floats);

        if (config.query_every > 0 && i % config.query_every == 0) {
            MetricsReport probe;
            probe.step = i;
            probe.comm_bytes = comm_bytes;
            probe.cum_update_ns = cum_ns;
            probe.amortized_update_ns = cum_ns / i;
            probe.sketch_bytes = 8 * peak_floats;
            std::int64_t rows = config.d;  // coordinator accumulator
            for (const SiteState& s : sites) rows += s.inner().residual().rows();
            probe.sketch_rows = rows;
            try {
                const Matrix sk = shrink_to_sketch(probe_gram(coord, sites, config.d), ell);
                probe.empirical_error = oracle.error(sk);
            } catch (const OracleCapExceeded&) {
                probe.empirical_error.reset();
            }
            result.probes.push_back(std::move(probe));
        }
    }

    result.comm_bytes = comm_bytes;
    result.broadcasts = coord.broadcasts();
    return result;
}

}  // namespace aero
