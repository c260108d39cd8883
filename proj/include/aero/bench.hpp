//
// Project     : aerosketch
// Module      : bench.hpp
// Description : benchmark scenarios, exact-oracle probes, CSV metrics output
//

#ifndef AERO_BENCH_HPP
#define AERO_BENCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aero/metrics.hpp"
#include "aero/sketch.hpp"
#include "aero/streams.hpp"

namespace aero {

enum class Scenario { Fd, Sw, Attp, Amm, Dist, DistSw };

struct RunConfig {
    Scenario scenario = Scenario::Fd;
    double eps = 0.2;
    int dim = 0;
    int dim_y = 0;                     // AMM second stream (0 = same as dim)
    std::int64_t window = 0;           // required for sw / amm / dist-sw
    double r_max = 0.0;                // required for sw
    int sites = 1;                     // dist / dist-sw
    std::optional<double> delta;       // probability amplification
    std::uint64_t seed = 0;
    std::int64_t query_every = 20;
    std::optional<std::string> input_path;   // else synthetic generation
    StreamFormat input_format = StreamFormat::Csv;
    GenKind gen_kind = GenKind::UniformRandom;
    std::int64_t rows = 0;
    double zeta = 1.0;
    bool normalize = false;
    bool baseline_svd = false;         // swap in the exact-SVD-dump comparator
    std::int64_t oracle_cap = 50000;
    std::optional<std::string> out_path;
};

// frozen CSV header (golden-file contract)
inline constexpr const char* kCsvHeader =
    "step,empirical_error,sketch_rows,sketch_bytes,amortized_update_ns,comm_bytes,"
    "level_selected";

// RNG substream ids: data streams use the site index (0 for single-stream
// scenarios); sketches use kSketchStreamBase + site index (see distributed.hpp)
inline constexpr std::uint64_t kDataStreamBase = 0;

std::vector<MetricsReport> run_scenario(const RunConfig& config);

void write_csv(const std::vector<MetricsReport>& reports, const std::string& path);
std::string csv_line(const MetricsReport& r);

// per-update exact-SVD-dump comparator: same snapshot/restore schema as the
// randomized sketch, but every update factorizes the full residual and dumps
// all directions at or above theta
class BaselineSvdSketch {
  public:
    BaselineSvdSketch(int d, double eps, double theta);

    void update(const Vector& a, std::int64_t i);
    Matrix query(std::int64_t lb, std::int64_t ub) const;

    void set_theta(double theta) { theta_ = theta; }
    double theta() const { return theta_; }
    int ell() const { return ell_; }
    std::int64_t clock() const { return clock_; }
    const Matrix& residual() const { return c_; }
    const std::deque<Snapshot>& snaps() const { return snaps_; }
    int reduce_count() const { return reduces_; }

  private:
    int d_;
    double eps_;
    int ell_;
    double theta_;
    Matrix c_;
    std::deque<Snapshot> snaps_;
    std::int64_t clock_;
    std::int64_t last_dump_t_;
    int reduces_;
};

}  // namespace aero

#endif  // AERO_BENCH_HPP
