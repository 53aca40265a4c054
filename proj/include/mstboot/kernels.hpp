#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mstboot/core.hpp"
#include "mstboot/rng.hpp"

// Low-level correlation / resampling kernels over raw row-major buffers.
// Replica-level and pair-level results are pure functions of their seeds, so
// callers may distribute work across threads freely without changing output.
namespace mstboot::kernels {

// Consecutive zero-variance redraws tolerated before a replica hard-fails.
inline constexpr int kMaxRedraws = 100;

/// Center and scale each row to zero mean / unit sum of squares.
/// Returns false (and stops) if a row is constant; bad_row reports which.
bool normalize_rows(const double* data, std::size_t n, std::size_t periods,
                    double* out, std::size_t* bad_row);

/// Upper-triangle dot products of normalized rows into a full symmetric
/// n x n matrix with unit diagonal, clamped to [-1, 1].
/// n_threads <= 1 runs serial; entries are schedule-independent either way.
void corr_from_normalized(const double* normalized, std::size_t n,
                          std::size_t periods, double* corr, int n_threads);

/// Pearson matrix of a raw panel, serial. Throws on a constant row.
Matrix pearson_raw(const double* data, std::size_t n, std::size_t periods);

/// Row-bootstrap replica: one shared draw of `periods` time indices applied to
/// every element. Rejects draws where any resampled row is constant and
/// retries with the next substream; throws after kMaxRedraws rejections.
Matrix row_resample_corr(const double* data, std::size_t n, std::size_t periods,
                         std::uint64_t replica_seed);

/// Same, with caller-chosen indices (no redraw logic). Test hook.
Matrix row_resample_corr_indices(const double* data, std::size_t n,
                                 std::size_t periods,
                                 const std::vector<std::uint32_t>& indices);

/// Pair-bootstrap replica: an independent draw of time indices per unordered
/// pair, from a substream keyed by (replica_seed, i, j). Same redraw policy,
/// applied per pair. The result is generally not positive semidefinite.
Matrix pair_resample_corr(const double* data, std::size_t n,
                          std::size_t periods, std::uint64_t replica_seed);

}  // namespace mstboot::kernels
