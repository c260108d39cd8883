//
// Project     : aerosketch
// Module      : distributed.hpp
// Description : coordinator/sites sketch protocol over an in-process
//               simulated message bus with byte-exact accounting
//

#ifndef AERO_DISTRIBUTED_HPP
#define AERO_DISTRIBUTED_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "aero/metrics.hpp"
#include "aero/sketch.hpp"
#include "aero/streams.hpp"

namespace aero {

enum class MsgKind { FroMass, FroBroadcast, SnapshotUpdate, Expire };

struct Message {
    MsgKind kind = MsgKind::FroMass;
    int from = -1;       // site id; -1 = coordinator
    double f = 0.0;      // FroMass payload / broadcast mass estimate
    Matrix z, m;         // SnapshotUpdate payload
    std::int64_t t = 0;  // snapshot / expiry timestamp

    // accounted size: 8 bytes per float + 16-byte header
    std::int64_t bytes() const {
        std::int64_t floats = 0;
        switch (kind) {
            case MsgKind::FroMass:
            case MsgKind::FroBroadcast:
            case MsgKind::Expire: floats = 1; break;
            case MsgKind::SnapshotUpdate: floats = z.size() + m.size(); break;
        }
        return 8 * floats + 16;
    }
};

// one observer site; snapshots are shipped to the coordinator as soon as
// they are produced, so the local queue stays empty
class SiteState {
  public:
    // window unset = whole-stream mode; set = sliding-window mode with
    // expiry notifications for previously shipped snapshots
    SiteState(int id, int d, double eps, int m, RngState rng,
              std::optional<std::int64_t> window = std::nullopt);

    void update(const Vector& a, std::int64_t i, std::vector<Message>& outbox);
    void on_broadcast(double f_hat);

    int id() const { return id_; }
    double f_local() const { return f_local_; }
    double f_hat_known() const { return f_hat_known_; }
    const AeroState& inner() const { return inner_; }

  private:
    int id_;
    int m_;
    double eps_;
    std::optional<std::int64_t> window_;
    AeroState inner_;
    double f_local_;       // mass accumulated since the last FroMass send
    double f_self_sent_;   // mass already reported in FroMass messages
    double f_hat_known_;   // last broadcast global mass estimate
    std::deque<std::int64_t> sent_snap_times_;
    // sliding-window mode: exact local window mass, reported as deltas
    std::deque<double> ring_;
    double w_local_;
    double w_last_sent_;
};

class CoordinatorState {
  public:
    CoordinatorState(int d, int m, bool window_mode);

    // processes one message; FroMass may yield a FroBroadcast to emit
    std::optional<Message> receive(const Message& msg);

    // eigendecompose the accumulator, clamp, shrink by the ell-th eigenvalue
    Matrix query(int ell) const;

    const Matrix& b() const { return b_; }
    double f_hat() const { return f_hat_; }
    int pending_fro_msgs() const { return msg_count_; }
    std::int64_t broadcasts() const { return broadcasts_; }
    const std::map<std::pair<int, std::int64_t>, Matrix>& contributions() const {
        return contributions_;
    }

  private:
    int d_;
    int m_;
    bool window_mode_;
    Matrix b_;
    double f_hat_;
    int msg_count_;
    std::int64_t broadcasts_;
    std::map<std::pair<int, std::int64_t>, Matrix> contributions_;
};

struct SimConfig {
    int m = 1;
    int d = 0;
    double eps = 0.0;
    std::optional<std::int64_t> window;  // set = sliding-window protocol
    std::int64_t query_every = 20;
    std::int64_t oracle_cap = 50000;
    std::int64_t latency = 0;            // delivery delay in ticks
    std::uint64_t seed = 0;
    // one stream per site, equal lengths; record t doubles as the global tick
    std::vector<std::vector<StreamRecord>> site_streams;
};

struct SimResult {
    std::vector<MetricsReport> probes;
    std::int64_t comm_bytes = 0;
    std::int64_t broadcasts = 0;
};

// deterministic event loop: per global tick every site ingests its next
// record; site->coordinator messages are delivered FIFO at the end of the
// tick and coordinator broadcasts at the start of the next one
SimResult run_simulation(const SimConfig& config);

// RNG substream convention shared with the single-stream benchmark paths:
// site j draws from stream kSketchStreamBase + j, so an m=1 simulation
// consumes exactly the same randomness as a standalone sketch on stream
// kSketchStreamBase
inline constexpr std::uint64_t kSketchStreamBase = 1000;

}  // namespace aero

#endif  // AERO_DISTRIBUTED_HPP
