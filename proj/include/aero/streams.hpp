//
// Project     : aerosketch
// Module      : streams.hpp
// Description : synthetic stream generators, CSV and AERO binary formats
//

#ifndef AERO_STREAMS_HPP
#define AERO_STREAMS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aero/linalg.hpp"
#include "aero/rng.hpp"

namespace aero {

struct StreamRecord {
    std::int64_t t = 0;            // 1-based, contiguous
    Vector vec;
    std::optional<int> site;
};

enum class GenKind { UniformRandom, RandomNoisy };

struct GenSpec {
    GenKind kind = GenKind::UniformRandom;
    std::int64_t rows = 0;
    int dim = 0;
    double zeta = 1.0;             // noise scale (RandomNoisy only)
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;      // RNG substream id
};

// entries drawn uniformly from (0, 1]
std::vector<StreamRecord> gen_uniform(const GenSpec& spec);

// rows of S*D*U + N/zeta: S, N standard normal, D_ii = 1 - (i-1)/d,
// U a seeded random orthonormal d x d matrix (QR of a Gaussian)
std::vector<StreamRecord> gen_noisy(const GenSpec& spec);

enum class StreamFormat { Csv, Aero };

std::vector<StreamRecord> load_stream(const std::string& path, StreamFormat format);
void save_stream(const std::vector<StreamRecord>& records, const std::string& path,
                 StreamFormat format);

struct NormStats {
    double min_sq = 0.0;
    double max_sq = 0.0;
};

NormStats stream_norm_stats(const std::vector<StreamRecord>& records);

// rescale so the minimum squared norm is 1; returns the induced norm bound R
double normalize_stream(std::vector<StreamRecord>& records);

}  // namespace aero

#endif  // AERO_STREAMS_HPP
