#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mstboot/core.hpp"
#include "mstboot/panel.hpp"

namespace mstboot {

struct PsdStatus {
  double min_eigenvalue = 0.0;
};

/// Symmetric matrix with unit diagonal and entries in [-1, 1]. Off-diagonal
/// values are clamped to [-1, 1] on construction (rounding near |rho| = 1);
/// anything further out of range than 1e-12 is rejected.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Matrix values);

  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  const Matrix& values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }

  std::optional<PsdStatus> psd;  // filled once a spectrum has been computed

 private:
  Matrix values_;
};

/// Sorted (ascending) eigenvalues of a correlation matrix.
struct Spectrum {
  std::vector<double> eigenvalues;

  double min() const { return eigenvalues.front(); }
  std::size_t negative_count() const;
};

/// Sample Pearson correlation. Each unordered pair is computed exactly once by
/// exactly one thread, so the result is independent of the parallel schedule.
/// n_threads <= 0 means "use all available".
CorrelationMatrix pearson(const ReturnsPanel& panel, int n_threads = 0);

/// Textbook two-pass serial route, kept as the reference the parallel kernel
/// is tested and benchmarked against.
CorrelationMatrix pearson_reference(const ReturnsPanel& panel);

/// d(i,j) = sqrt(2 (1 - rho(i,j))), zero diagonal, range [0, 2]. Strictly
/// decreasing in rho, so the MST on d equals the maximum spanning tree on rho.
Matrix to_distance(const CorrelationMatrix& corr);

/// All n real eigenvalues, ascending. Also records psd status on `corr`.
Spectrum spectrum(CorrelationMatrix& corr);
Spectrum spectrum(const Matrix& symmetric);

struct ShrinkResult {
  CorrelationMatrix matrix;
  double alpha = 0.0;
};

/// C' = (1-alpha) C + alpha I with the minimal alpha in [0, 1] such that the
/// smallest eigenvalue of C' is >= floor. Identity target keeps the unit
/// diagonal intact.
ShrinkResult shrink_to_psd(const CorrelationMatrix& corr, double floor = 1e-10);

/// Square CSV with a header row/column of element identifiers, 17 significant
/// digits per entry.
void write_correlation_csv(const CorrelationMatrix& corr,
                           const std::vector<std::string>& elements,
                           const std::string& path);

}  // namespace mstboot
