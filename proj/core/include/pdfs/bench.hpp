#pragma once

#include "pdfs/matrix.hpp"
#include "pdfs/projections.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace pdfs {

struct ProjectionTiming {
    BallKind kind = BallKind::L1;
    Index d = 0;
    Index k = 0;
    double median_ms = 0.0;
    int reps = 0;
};

/// Median wall time of projecting a fixed Gaussian d x k matrix onto the unit
/// ball. One warm-up call is made first and discarded.
ProjectionTiming time_projection(BallKind kind, Index d, Index k, int reps, std::uint64_t seed = 0);

/// Every (kind, d, k) combination, in that nesting order.
std::vector<ProjectionTiming> bench_projections(std::span<const BallKind> kinds, std::span<const Index> dims,
                                                std::span<const Index> ks, int reps, std::uint64_t seed = 0);

/// projection,d,k,median_ms,reps
void write_timing_csv(std::ostream& out, std::span<const ProjectionTiming> rows);

/// d x k matrix of standard normals from the counter-based generator.
Matrix gaussian_matrix(Index d, Index k, std::uint64_t seed);

} // namespace pdfs
