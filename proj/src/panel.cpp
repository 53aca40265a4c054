#include "mstboot/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

namespace mstboot {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

ReturnsPanel::ReturnsPanel(std::vector<std::string> elements, Matrix observations,
                           std::vector<std::string> time_labels)
    : elements_(std::move(elements)),
      observations_(std::move(observations)),
      time_labels_(std::move(time_labels)) {
  const auto n = elements_.size();
  const auto periods = static_cast<std::size_t>(observations_.cols());
  if (static_cast<std::size_t>(observations_.rows()) != n) {
    throw Error("panel: element count does not match observation rows");
  }
  if (n < 2) throw Error("panel: need at least 2 elements");
  if (periods < 3) throw Error("panel: need at least 3 observations per element");
  if (!time_labels_.empty() && time_labels_.size() != periods) {
    throw Error("panel: time label count does not match observation columns");
  }

  std::unordered_set<std::string> seen;
  for (const auto& id : elements_) {
    if (id.empty()) throw Error("panel: empty element identifier");
    if (!seen.insert(id).second) {
      throw Error("panel: duplicate element identifier '" + id + "'");
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double* r = observations_.data() + i * periods;
    double lo = r[0];
    double hi = r[0];
    for (std::size_t t = 0; t < periods; ++t) {
      if (!std::isfinite(r[t])) {
        throw Error("panel: non-finite value at (" + std::to_string(i) + ", " +
                    std::to_string(t) + ") element '" + elements_[i] + "'");
      }
      lo = std::min(lo, r[t]);
      hi = std::max(hi, r[t]);
    }
    if (lo == hi) {
      throw Error("panel: zero variance element '" + elements_[i] + "'");
    }
  }
}

ReturnsPanel load_panel(const std::string& path, PanelFormat format) {
  if (format != PanelFormat::WideCsv) throw Error("load_panel: unknown format");
  std::ifstream in(path);
  if (!in) throw Error("load_panel: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw Error("load_panel: empty file '" + path + "'");
  auto header = split_csv_line(strip_cr(line));
  if (header.size() < 3) {
    throw Error("load_panel: header needs a time column and at least 2 elements");
  }
  std::vector<std::string> elements(header.begin() + 1, header.end());
  const std::size_t n = elements.size();

  std::vector<std::string> time_labels;
  std::vector<double> cells;  // T x n, row per time record
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != n + 1) {
      throw Error("load_panel: line " + std::to_string(line_no) + " has " +
                  std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(n + 1));
    }
    time_labels.push_back(fields[0]);
    for (std::size_t c = 0; c < n; ++c) {
      cells.push_back(parse_double(fields[c + 1],
                                   "at line " + std::to_string(line_no) +
                                       ", column " + std::to_string(c + 2)));
    }
  }
  const std::size_t periods = time_labels.size();
  if (periods < 3) throw Error("load_panel: need at least 3 data rows");

  Matrix obs(n, periods);
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t i = 0; i < n; ++i) obs(i, t) = cells[t * n + i];
  }
  return ReturnsPanel(std::move(elements), std::move(obs), std::move(time_labels));
}

void write_panel(const ReturnsPanel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_panel: cannot open '" + path + "'");
  out << "date";
  for (const auto& id : panel.elements()) out << ',' << id;
  out << '\n';
  const std::size_t periods = panel.periods();
  for (std::size_t t = 0; t < periods; ++t) {
    out << (panel.time_labels().empty() ? std::to_string(t)
                                        : panel.time_labels()[t]);
    for (std::size_t i = 0; i < panel.n(); ++i) {
      out << ',' << format_double(panel.observations()(i, t));
    }
    out << '\n';
  }
}

void SectorMap::require_covers(const std::vector<std::string>& elements) const {
  for (const auto& id : elements) {
    if (assignments.find(id) == assignments.end()) {
      throw Error("sector map: element '" + id + "' has no sector assignment");
    }
  }
}

SectorMap load_sectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_sectors: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error("load_sectors: empty file");
  auto header = split_csv_line(strip_cr(line));
  if (header.size() != 3 || header[0] != "element" || header[1] != "sector" ||
      header[2] != "subsector") {
    throw Error("load_sectors: header must be 'element,sector,subsector'");
  }
  SectorMap map;
  std::map<std::string, std::string> subsector_owner;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw Error("load_sectors: line " + std::to_string(line_no) +
                  " needs 3 fields");
    }
    if (!map.assignments.emplace(fields[0], std::make_pair(fields[1], fields[2]))
             .second) {
      throw Error("load_sectors: duplicate element '" + fields[0] + "'");
    }
    auto [it, inserted] = subsector_owner.emplace(fields[2], fields[1]);
    if (!inserted && it->second != fields[1]) {
      throw Error("load_sectors: subsector '" + fields[2] +
                  "' appears under two sectors");
    }
  }
  return map;
}

void write_sectors(const SectorMap& sectors, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_sectors: cannot open '" + path + "'");
  out << "element,sector,subsector\n";
  for (const auto& [id, pair] : sectors.assignments) {
    out << id << ',' << pair.first << ',' << pair.second << '\n';
  }
}

ReturnsPanel returns_from_prices(const ReturnsPanel& open_prices,
                                 const ReturnsPanel& close_prices) {
  if (open_prices.elements() != close_prices.elements()) {
    throw Error("returns_from_prices: element labels differ");
  }
  if (open_prices.periods() != close_prices.periods()) {
    throw Error("returns_from_prices: period counts differ");
  }
  const std::size_t n = open_prices.n();
  const std::size_t periods = open_prices.periods();
  Matrix ret(n, periods);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < periods; ++t) {
      const double o = open_prices.observations()(i, t);
      const double c = close_prices.observations()(i, t);
      if (!(o > 0.0) || !(c > 0.0)) {
        throw Error("returns_from_prices: non-positive price at (" +
                    std::to_string(i) + ", " + std::to_string(t) + ")");
      }
      ret(i, t) = std::log(c / o);
    }
  }
  return ReturnsPanel(open_prices.elements(), std::move(ret),
                      open_prices.time_labels());
}

void SynthSpec::validate() const {
  if (n_elements < 2) throw Error("synth spec: n_elements must be >= 2");
  if (n_sectors < 1) throw Error("synth spec: n_sectors must be >= 1");
  if (n_sectors > n_elements) throw Error("synth spec: more sectors than elements");
  if (n_periods < 3) throw Error("synth spec: T must be >= 3");
  if (!(market_loading >= 0.0) || market_loading >= 1.0) {
    throw Error("synth spec: market loading must be in [0, 1)");
  }
  if (!(sector_loading >= 0.0) || sector_loading >= 1.0) {
    throw Error("synth spec: sector loading must be in [0, 1)");
  }
  const double total = market_loading * market_loading + sector_loading * sector_loading;
  if (total >= 1.0) {
    throw Error("synth spec: market^2 + sector^2 = " + format_double(total) +
                " leaves no idiosyncratic variance");
  }
  if (!(noise_scale > 0.0)) throw Error("synth spec: noise scale must be positive");
}

std::pair<ReturnsPanel, SectorMap> synthesize_panel(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_elements;
  const std::size_t S = spec.n_sectors;
  const std::size_t periods = spec.n_periods;
  const double m = spec.market_loading;
  const double s = spec.sector_loading;
  const double idio = std::sqrt(1.0 - m * m - s * s);

  std::mt19937_64 gen(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> market(periods);
  for (auto& v : market) v = gauss(gen);
  Matrix sector_factors(S, periods);
  for (std::size_t k = 0; k < S; ++k) {
    for (std::size_t t = 0; t < periods; ++t) sector_factors(k, t) = gauss(gen);
  }

  Matrix obs(n, periods);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t sec = i % S;
    for (std::size_t t = 0; t < periods; ++t) {
      obs(i, t) = spec.noise_scale * (m * market[t] + s * sector_factors(sec, t) +
                                      idio * gauss(gen));
    }
  }

  const int id_width = std::max<int>(3, std::to_string(n - 1).size());
  std::vector<std::string> elements(n);
  SectorMap sectors;
  for (std::size_t i = 0; i < n; ++i) {
    std::ostringstream id;
    id << 'E';
    id.width(id_width);
    id.fill('0');
    id << i;
    elements[i] = id.str();
    const std::string sec = "S" + std::to_string(i % S);
    sectors.assignments[elements[i]] = {sec, sec};
  }

  std::vector<std::string> time_labels(periods);
  for (std::size_t t = 0; t < periods; ++t) {
    time_labels[t] = "t" + std::to_string(t);
  }

  return {ReturnsPanel(std::move(elements), std::move(obs), std::move(time_labels)),
          std::move(sectors)};
}

}  // namespace mstboot
