//
// Project     : aerosketch
// Module      : streams.cpp
// Description : synthetic stream generators, CSV and AERO binary formats
//

#include "aero/streams.hpp"

#include <bit>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace aero {

static_assert(std::endian::native == std::endian::little,
              "AERO binary I/O assumes a little-endian host");

std::vector<StreamRecord> gen_uniform(const GenSpec& spec) {
    if (spec.kind != GenKind::UniformRandom) throw InvalidInput("gen_uniform: wrong kind");
    if (spec.rows < 1 || spec.dim < 1) throw InvalidInput("gen_uniform: rows/dim must be >= 1");
    RngState rng(spec.seed, spec.stream);
    std::vector<StreamRecord> out;
    out.reserve(spec.rows);
    for (std::int64_t t = 1; t <= spec.rows; ++t) {
        Vector v(spec.dim);
        for (int j = 0; j < spec.dim; ++j) v(j) = rng.uniform();
        out.push_back(StreamRecord{t, std::move(v), std::nullopt});
    }
    return out;
}

std::vector<StreamRecord> gen_noisy(const GenSpec& spec) {
    if (spec.kind != GenKind::RandomNoisy) throw InvalidInput("gen_noisy: wrong kind");
    if (spec.rows < 1 || spec.dim < 1) throw InvalidInput("gen_noisy: rows/dim must be >= 1");
    if (!(spec.zeta > 0.0)) throw InvalidInput("gen_noisy: zeta must be > 0");
    RngState rng(spec.seed, spec.stream);

    const int d = spec.dim;
    // seeded random orthonormal rotation (drawn first, row-major)
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.gaussian();
    const Matrix u = qr(g).first;

    Vector dprof(d);  // linearly decaying signal profile
    for (int i = 0; i < d; ++i) dprof(i) = 1.0 - static_cast<double>(i) / d;

    std::vector<StreamRecord> out;
    out.reserve(spec.rows);
    for (std::int64_t t = 1; t <= spec.rows; ++t) {
        Vector s(d), noise(d);
        for (int j = 0; j < d; ++j) s(j) = rng.gaussian();
        for (int j = 0; j < d; ++j) noise(j) = rng.gaussian();
        Vector row = u.transpose() * dprof.cwiseProduct(s) + noise / spec.zeta;
        out.push_back(StreamRecord{t, std::move(row), std::nullopt});
    }
    return out;
}

namespace {

std::vector<StreamRecord> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    std::vector<StreamRecord> out;
    std::string line;
    std::int64_t lineno = 0;
    std::int64_t d = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> vals;
        const char* p = line.c_str();
        while (*p) {
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(p, &end);
            if (end == p || errno == ERANGE)
                throw FormatError(path + ":" + std::to_string(lineno) + ": bad float");
            if (!std::isfinite(v))
                throw FormatError(path + ":" + std::to_string(lineno) + ": non-finite value");
            vals.push_back(v);
            p = end;
            while (*p == ' ' || *p == '\t') ++p;
            if (*p == ',') ++p;
            else if (*p) throw FormatError(path + ":" + std::to_string(lineno) + ": bad separator");
        }
        if (vals.empty())
            throw FormatError(path + ":" + std::to_string(lineno) + ": empty row");
        if (d < 0) d = static_cast<std::int64_t>(vals.size());
        if (static_cast<std::int64_t>(vals.size()) != d)
            throw FormatError(path + ":" + std::to_string(lineno) + ": ragged row (expected "
                              + std::to_string(d) + " fields)");
        Vector v = Eigen::Map<const Vector>(vals.data(), vals.size());
        out.push_back(StreamRecord{static_cast<std::int64_t>(out.size()) + 1, std::move(v),
                                   std::nullopt});
    }
    return out;
}

constexpr unsigned char kAeroMagic[4] = {0x41, 0x45, 0x52, 0x4f};  // "AERO"
constexpr unsigned char kAeroVersion = 0x01;

std::vector<StreamRecord> load_aero(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    unsigned char magic[4];
    if (!in.read(reinterpret_cast<char*>(magic), 4) || std::memcmp(magic, kAeroMagic, 4) != 0)
        throw FormatError(path + ": bad magic");
    unsigned char version = 0;
    if (!in.read(reinterpret_cast<char*>(&version), 1) || version != kAeroVersion)
        throw FormatError(path + ": unsupported version");
    std::uint32_t d = 0;
    std::uint64_t n = 0;
    if (!in.read(reinterpret_cast<char*>(&d), 4) || !in.read(reinterpret_cast<char*>(&n), 8))
        throw FormatError(path + ": truncated header");
    if (d == 0) throw FormatError(path + ": zero dimension");

    std::vector<StreamRecord> out;
    std::vector<double> row(d);
    for (std::uint64_t i = 0; n == 0 || i < n; ++i) {
        if (!in.read(reinterpret_cast<char*>(row.data()), 8 * static_cast<std::streamsize>(d))) {
            if (n == 0 && in.gcount() == 0) break;  // n=0 means "until EOF"
            throw FormatError(path + ": truncated row " + std::to_string(i + 1));
        }
        for (double v : row)
            if (!std::isfinite(v)) throw FormatError(path + ": non-finite value");
        Vector vec = Eigen::Map<const Vector>(row.data(), d);
        out.push_back(StreamRecord{static_cast<std::int64_t>(out.size()) + 1, std::move(vec),
                                   std::nullopt});
    }
    return out;
}

}  // namespace

std::vector<StreamRecord> load_stream(const std::string& path, StreamFormat format) {
    return format == StreamFormat::Csv ? load_csv(path) : load_aero(path);
}

void save_stream(const std::vector<StreamRecord>& records, const std::string& path,
                 StreamFormat format) {
    if (records.empty()) throw InvalidInput("save_stream: empty record set");
    const Eigen::Index d = records.front().vec.size();
    for (const StreamRecord& r : records)
        if (r.vec.size() != d) throw InvalidInput("save_stream: nonuniform dimension");

    if (format == StreamFormat::Csv) {
        std::ofstream out(path);
        if (!out) throw FormatError("cannot write " + path);
        out << "# aerosketch stream d=" << d << " n=" << records.size() << "\n";
        char buf[64];
        for (const StreamRecord& r : records) {
            for (Eigen::Index j = 0; j < d; ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", r.vec(j));  // round-trip safe
                if (j) out << ',';
                out << buf;
            }
            out << '\n';
        }
        if (!out) throw FormatError("write failure on " + path);
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw FormatError("cannot write " + path);
        out.write(reinterpret_cast<const char*>(kAeroMagic), 4);
        out.write(reinterpret_cast<const char*>(&kAeroVersion), 1);
        const std::uint32_t d32 = static_cast<std::uint32_t>(d);
        const std::uint64_t n64 = records.size();
        out.write(reinterpret_cast<const char*>(&d32), 4);
        out.write(reinterpret_cast<const char*>(&n64), 8);
        for (const StreamRecord& r : records)
            out.write(reinterpret_cast<const char*>(r.vec.data()),
                      8 * static_cast<std::streamsize>(d));
        if (!out) throw FormatError("write failure on " + path);
    }
}

NormStats stream_norm_stats(const std::vector<StreamRecord>& records) {
    NormStats stats;
    bool first = true;
    for (const StreamRecord& r : records) {
        const double sq = r.vec.squaredNorm();
        if (first || sq < stats.min_sq) stats.min_sq = sq;
        if (first || sq > stats.max_sq) stats.max_sq = sq;
        first = false;
    }
    return stats;
}

double normalize_stream(std::vector<StreamRecord>& records) {
    const NormStats stats = stream_norm_stats(records);
    if (!(stats.min_sq > 0.0)) throw InvalidInput("normalize_stream: zero-norm row present");
    const double scale = 1.0 / std::sqrt(stats.min_sq);
    for (StreamRecord& r : records) r.vec *= scale;
    return stats.max_sq / stats.min_sq;  // induced R
}

}  // namespace aero
