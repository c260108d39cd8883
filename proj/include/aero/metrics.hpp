//
// Project     : aerosketch
// Module      : metrics.hpp
// Description : per-probe metrics record shared by the benchmark scenarios
//

#ifndef AERO_METRICS_HPP
#define AERO_METRICS_HPP

#include <cstdint>
#include <optional>

namespace aero {

struct MetricsReport {
    std::int64_t step = 0;
    std::optional<double> empirical_error;   // empty when the oracle cap is hit
    std::int64_t sketch_rows = 0;            // peak row count so far
    std::int64_t sketch_bytes = 0;           // peak 8*floats stored so far
    std::int64_t cum_update_ns = 0;
    std::int64_t amortized_update_ns = 0;    // cum_update_ns / step
    std::int64_t comm_bytes = 0;             // distributed scenarios only
    std::optional<int> level_selected;       // sliding-window scenarios only
};

}  // namespace aero

#endif  // AERO_METRICS_HPP
