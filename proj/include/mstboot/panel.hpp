#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mstboot/core.hpp"

namespace mstboot {

enum class PanelFormat { WideCsv };

/// n x T panel of real-valued observations (log-returns) with element labels
/// and optional time labels. Immutable after construction.
class ReturnsPanel {
 public:
  /// Validates: n >= 2, T >= 3, unique element ids, finite values, no
  /// zero-variance (constant) row.
  ReturnsPanel(std::vector<std::string> elements, Matrix observations,
               std::vector<std::string> time_labels = {});

  std::size_t n() const { return elements_.size(); }
  std::size_t periods() const { return static_cast<std::size_t>(observations_.cols()); }
  const std::vector<std::string>& elements() const { return elements_; }
  const Matrix& observations() const { return observations_; }
  const std::vector<std::string>& time_labels() const { return time_labels_; }
  const double* row(std::size_t i) const { return observations_.data() + i * periods(); }

 private:
  std::vector<std::string> elements_;
  Matrix observations_;
  std::vector<std::string> time_labels_;
};

/// Expert classification: element -> (sector, subsector). Subsectors are
/// nested (each subsector belongs to exactly one sector; checked at load).
struct SectorMap {
  std::map<std::string, std::pair<std::string, std::string>> assignments;

  /// Throws unless every panel element is assigned exactly once.
  void require_covers(const std::vector<std::string>& elements) const;
};

/// Hierarchical one-market / one-sector-factor Gaussian model used to stand in
/// for panel data at desk scale.
struct SynthSpec {
  std::size_t n_elements = 0;
  std::size_t n_sectors = 0;
  std::size_t n_periods = 0;
  double market_loading = 0.0;
  double sector_loading = 0.0;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;

  void validate() const;  // throws Error on violation
};

ReturnsPanel load_panel(const std::string& path, PanelFormat format = PanelFormat::WideCsv);
void write_panel(const ReturnsPanel& panel, const std::string& path);

SectorMap load_sectors(const std::string& path);
void write_sectors(const SectorMap& sectors, const std::string& path);

/// observation(i,t) = ln(close(i,t) / open(i,t)); shapes and labels must match.
ReturnsPanel returns_from_prices(const ReturnsPanel& open_prices,
                                 const ReturnsPanel& close_prices);

/// observation(i,t) = scale * (m f(t) + s g_{sec(i)}(t) + sqrt(1-m^2-s^2) eps_i(t))
/// with independent standard Gaussian factors drawn from a generator seeded by
/// spec.seed. Elements are assigned round-robin to sectors; in synthetic mode
/// subsector == sector. Pure function of the spec.
std::pair<ReturnsPanel, SectorMap> synthesize_panel(const SynthSpec& spec);

}  // namespace mstboot
