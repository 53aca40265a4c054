#include "mstboot/correlation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <omp.h>

#include "mstboot/kernels.hpp"

namespace mstboot {

namespace kernels {

bool normalize_rows(const double* data, std::size_t n, std::size_t periods,
                    double* out, std::size_t* bad_row) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* src = data + i * periods;
    double* dst = out + i * periods;
    double mean = 0.0;
    for (std::size_t t = 0; t < periods; ++t) mean += src[t];
    mean /= static_cast<double>(periods);
    double ss = 0.0;
    for (std::size_t t = 0; t < periods; ++t) {
      const double c = src[t] - mean;
      dst[t] = c;
      ss += c * c;
    }
    if (ss <= 0.0) {
      if (bad_row) *bad_row = i;
      return false;
    }
    const double inv = 1.0 / std::sqrt(ss);
    for (std::size_t t = 0; t < periods; ++t) dst[t] *= inv;
  }
  return true;
}

void corr_from_normalized(const double* normalized, std::size_t n,
                          std::size_t periods, double* corr, int n_threads) {
  const auto ni = static_cast<std::int64_t>(n);
  const int threads = n_threads > 0 ? n_threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::int64_t i = 0; i < ni; ++i) {
    corr[i * ni + i] = 1.0;
    const double* ri = normalized + static_cast<std::size_t>(i) * periods;
    for (std::int64_t j = i + 1; j < ni; ++j) {
      const double* rj = normalized + static_cast<std::size_t>(j) * periods;
      double dot = 0.0;
      for (std::size_t t = 0; t < periods; ++t) dot += ri[t] * rj[t];
      dot = std::clamp(dot, -1.0, 1.0);
      corr[i * ni + j] = dot;
      corr[j * ni + i] = dot;
    }
  }
}

Matrix pearson_raw(const double* data, std::size_t n, std::size_t periods) {
  std::vector<double> normalized(n * periods);
  std::size_t bad = 0;
  if (!normalize_rows(data, n, periods, normalized.data(), &bad)) {
    throw Error("pearson: zero variance row " + std::to_string(bad));
  }
  Matrix corr(n, n);
  corr_from_normalized(normalized.data(), n, periods, corr.data(), 1);
  return corr;
}

namespace {

// Gathers the time columns named by `indices` into `out` and reports whether
// every resampled row is non-constant (min < max exactly).
bool gather_columns(const double* data, std::size_t n, std::size_t periods,
                    const std::uint32_t* indices, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* src = data + i * periods;
    double* dst = out + i * periods;
    double lo = src[indices[0]];
    double hi = lo;
    for (std::size_t t = 0; t < periods; ++t) {
      const double v = src[indices[t]];
      dst[t] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo == hi) return false;
  }
  return true;
}

}  // namespace

Matrix row_resample_corr(const double* data, std::size_t n, std::size_t periods,
                         std::uint64_t replica_seed) {
  std::vector<std::uint32_t> indices(periods);
  std::vector<double> resampled(n * periods);
  const auto bound = static_cast<std::uint32_t>(periods);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    rng::SplitMix64 gen(rng::mix(replica_seed, static_cast<std::uint64_t>(attempt)));
    for (std::size_t t = 0; t < periods; ++t) indices[t] = gen.next_below(bound);
    if (!gather_columns(data, n, periods, indices.data(), resampled.data())) {
      continue;
    }
    std::size_t bad = 0;
    if (!normalize_rows(resampled.data(), n, periods, resampled.data(), &bad)) {
      continue;  // distinct values can still cancel to zero sum of squares
    }
    Matrix corr(n, n);
    corr_from_normalized(resampled.data(), n, periods, corr.data(), 1);
    return corr;
  }
  throw Error("row bootstrap: " + std::to_string(kMaxRedraws) +
              " consecutive zero-variance resamples");
}

Matrix row_resample_corr_indices(const double* data, std::size_t n,
                                 std::size_t periods,
                                 const std::vector<std::uint32_t>& indices) {
  if (indices.size() != periods) {
    throw Error("row resample: need exactly T indices");
  }
  for (auto idx : indices) {
    if (idx >= periods) throw Error("row resample: index out of range");
  }
  std::vector<double> resampled(n * periods);
  if (!gather_columns(data, n, periods, indices.data(), resampled.data())) {
    throw Error("row resample: zero variance row under given indices");
  }
  std::size_t bad = 0;
  if (!normalize_rows(resampled.data(), n, periods, resampled.data(), &bad)) {
    throw Error("row resample: zero variance row under given indices");
  }
  Matrix corr(n, n);
  corr_from_normalized(resampled.data(), n, periods, corr.data(), 1);
  return corr;
}

Matrix pair_resample_corr(const double* data, std::size_t n,
                          std::size_t periods, std::uint64_t replica_seed) {
  Matrix corr = Matrix::Identity(n, n);
  std::vector<double> x(periods);
  std::vector<double> y(periods);
  const auto bound = static_cast<std::uint32_t>(periods);
  const double tf = static_cast<double>(periods);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double* ri = data + i * periods;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* rj = data + j * periods;
      const std::uint64_t pair_key = (static_cast<std::uint64_t>(i) << 32) | j;
      const std::uint64_t pair_seed = rng::mix(replica_seed, pair_key);
      bool done = false;
      for (int attempt = 0; attempt < kMaxRedraws && !done; ++attempt) {
        rng::SplitMix64 gen(rng::mix(pair_seed, static_cast<std::uint64_t>(attempt)));
        double sx = 0.0, sy = 0.0;
        double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
        for (std::size_t t = 0; t < periods; ++t) {
          const std::uint32_t idx = gen.next_below(bound);
          const double a = ri[idx];
          const double b = rj[idx];
          x[t] = a;
          y[t] = b;
          sx += a;
          sy += b;
          if (t == 0) {
            xlo = xhi = a;
            ylo = yhi = b;
          } else {
            xlo = std::min(xlo, a);
            xhi = std::max(xhi, a);
            ylo = std::min(ylo, b);
            yhi = std::max(yhi, b);
          }
        }
        if (xlo == xhi || ylo == yhi) continue;
        const double mx = sx / tf;
        const double my = sy / tf;
        double sxx = 0.0, syy = 0.0, sxy = 0.0;
        for (std::size_t t = 0; t < periods; ++t) {
          const double dx = x[t] - mx;
          const double dy = y[t] - my;
          sxx += dx * dx;
          syy += dy * dy;
          sxy += dx * dy;
        }
        if (sxx <= 0.0 || syy <= 0.0) continue;
        const double rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
        corr(i, j) = rho;
        corr(j, i) = rho;
        done = true;
      }
      if (!done) {
        throw Error("pair bootstrap: " + std::to_string(kMaxRedraws) +
                    " consecutive zero-variance resamples for pair (" +
                    std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  return corr;
}

}  // namespace kernels

CorrelationMatrix::CorrelationMatrix(Matrix values) : values_(std::move(values)) {
  const auto n = values_.rows();
  if (n < 1 || values_.cols() != n) {
    throw Error("correlation: matrix must be square and non-empty");
  }
  constexpr double kTol = 1e-12;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = values_(i, i);
    if (!std::isfinite(d) || std::abs(d - 1.0) > kTol) {
      throw Error("correlation: diagonal entry " + std::to_string(i) +
                  " is not 1 (" + format_double(d) + ")");
    }
    values_(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double a = values_(i, j);
      const double b = values_(j, i);
      if (!std::isfinite(a) || !std::isfinite(b)) {
        throw Error("correlation: non-finite entry at (" + std::to_string(i) +
                    ", " + std::to_string(j) + ")");
      }
      if (std::abs(a - b) > kTol) {
        throw Error("correlation: asymmetric at (" + std::to_string(i) + ", " +
                    std::to_string(j) + ")");
      }
      if (std::abs(a) > 1.0 + kTol) {
        throw Error("correlation: entry out of [-1, 1] at (" + std::to_string(i) +
                    ", " + std::to_string(j) + "): " + format_double(a));
      }
      const double v = std::clamp(a, -1.0, 1.0);
      values_(i, j) = v;
      values_(j, i) = v;
    }
  }
}

std::size_t Spectrum::negative_count() const {
  return static_cast<std::size_t>(
      std::count_if(eigenvalues.begin(), eigenvalues.end(),
                    [](double v) { return v < 0.0; }));
}

CorrelationMatrix pearson(const ReturnsPanel& panel, int n_threads) {
  const std::size_t n = panel.n();
  const std::size_t periods = panel.periods();
  std::vector<double> normalized(n * periods);
  std::size_t bad = 0;
  if (!kernels::normalize_rows(panel.observations().data(), n, periods,
                               normalized.data(), &bad)) {
    throw Error("pearson: zero variance element '" + panel.elements()[bad] + "'");
  }
  Matrix corr(n, n);
  kernels::corr_from_normalized(normalized.data(), n, periods, corr.data(),
                                n_threads);
  return CorrelationMatrix(std::move(corr));
}

CorrelationMatrix pearson_reference(const ReturnsPanel& panel) {
  const std::size_t n = panel.n();
  const std::size_t periods = panel.periods();
  const double tf = static_cast<double>(periods);
  Matrix corr(n, n);
  for (std::size_t i = 0; i < n; ++i) corr(i, i) = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double* xi = panel.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* xj = panel.row(j);
      double mx = 0.0, my = 0.0;
      for (std::size_t t = 0; t < periods; ++t) {
        mx += xi[t];
        my += xj[t];
      }
      mx /= tf;
      my /= tf;
      double sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (std::size_t t = 0; t < periods; ++t) {
        const double dx = xi[t] - mx;
        const double dy = xj[t] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
      }
      if (sxx <= 0.0 || syy <= 0.0) {
        throw Error("pearson: zero variance element '" + panel.elements()[i] +
                    "' or '" + panel.elements()[j] + "'");
      }
      const double rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
      corr(i, j) = rho;
      corr(j, i) = rho;
    }
  }
  return CorrelationMatrix(std::move(corr));
}

Matrix to_distance(const CorrelationMatrix& corr) {
  const auto n = static_cast<Eigen::Index>(corr.size());
  Matrix dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = std::sqrt(std::max(0.0, 2.0 * (1.0 - corr.values()(i, j))));
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

namespace {

Spectrum compute_spectrum(const Matrix& symmetric) {
  if (symmetric.rows() != symmetric.cols() || symmetric.rows() < 1) {
    throw Error("spectrum: matrix must be square and non-empty");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("spectrum: eigensolver did not converge");
  }
  Spectrum s;
  const auto& ev = solver.eigenvalues();
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  return s;
}

}  // namespace

Spectrum spectrum(CorrelationMatrix& corr) {
  Spectrum s = compute_spectrum(corr.values());
  corr.psd = PsdStatus{s.min()};
  return s;
}

Spectrum spectrum(const Matrix& symmetric) { return compute_spectrum(symmetric); }

ShrinkResult shrink_to_psd(const CorrelationMatrix& corr, double floor) {
  if (!(floor >= 0.0) || floor >= 1.0) {
    throw Error("shrink: floor must be in [0, 1)");
  }
  const Spectrum before = compute_spectrum(corr.values());
  const double lambda = before.min();
  double alpha = 0.0;
  if (lambda < floor) {
    // lambda < floor < 1 keeps the denominator strictly positive
    alpha = std::clamp((floor - lambda) / (1.0 - lambda), 0.0, 1.0);
  }
  Matrix shrunk = corr.values();
  if (alpha > 0.0) {
    shrunk *= (1.0 - alpha);
    shrunk.diagonal().setConstant(1.0);
  }
  ShrinkResult result{CorrelationMatrix(std::move(shrunk)), alpha};
  spectrum(result.matrix);  // record psd status on the repaired matrix
  return result;
}

void write_correlation_csv(const CorrelationMatrix& corr,
                           const std::vector<std::string>& elements,
                           const std::string& path) {
  if (elements.size() != corr.size()) {
    throw Error("write_correlation_csv: label count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw Error("write_correlation_csv: cannot open '" + path + "'");
  out << "element";
  for (const auto& id : elements) out << ',' << id;
  out << '\n';
  const std::size_t n = corr.size();
  for (std::size_t i = 0; i < n; ++i) {
    out << elements[i];
    for (std::size_t j = 0; j < n; ++j) {
      out << ',' << format_double17(corr.values()(i, j));
    }
    out << '\n';
  }
}

}  // namespace mstboot
