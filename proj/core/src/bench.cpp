#include "pdfs/bench.hpp"

#include "pdfs/error.hpp"
#include "pdfs/random.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>

namespace pdfs {

Matrix gaussian_matrix(Index d, Index k, std::uint64_t seed) {
    CounterRng rng(seed, static_cast<std::uint64_t>(d * 1000003 + k));
    Matrix a(d, k);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    return a;
}

ProjectionTiming time_projection(BallKind kind, Index d, Index k, int reps, std::uint64_t seed) {
    if (reps < 1) throw InvalidArgument("time_projection: need at least one repetition");
    if (d < 1 || k < 1) throw InvalidArgument("time_projection: dimensions must be positive");
    using clock = std::chrono::steady_clock;
    const Matrix v = gaussian_matrix(d, k, seed);
    const BallSpec ball{kind, 1.0};

    volatile double sink = project(v, ball)(0, 0); // warm-up
    std::vector<double> ms(static_cast<std::size_t>(reps));
    for (auto& t : ms) {
        const auto start = clock::now();
        const Matrix w = project(v, ball);
        t = std::chrono::duration<double, std::milli>(clock::now() - start).count();
        sink = w(0, 0);
    }
    (void)sink;
    const auto mid = ms.begin() + static_cast<std::ptrdiff_t>(ms.size() / 2);
    std::nth_element(ms.begin(), mid, ms.end());
    return ProjectionTiming{kind, d, k, *mid, reps};
}

std::vector<ProjectionTiming> bench_projections(std::span<const BallKind> kinds, std::span<const Index> dims,
                                                std::span<const Index> ks, int reps, std::uint64_t seed) {
    std::vector<ProjectionTiming> out;
    for (BallKind kind : kinds) {
        for (Index d : dims) {
            for (Index k : ks) out.push_back(time_projection(kind, d, k, reps, seed));
        }
    }
    return out;
}

void write_timing_csv(std::ostream& out, std::span<const ProjectionTiming> rows) {
    out << "projection,d,k,median_ms,reps\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6g", r.median_ms);
        out << to_string(r.kind) << ',' << r.d << ',' << r.k << ',' << buf << ',' << r.reps << '\n';
    }
}

} // namespace pdfs
