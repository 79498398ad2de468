#pragma once

#include <string>
#include <utility>
#include <vector>

#include "heatlab/alpha.hpp"
#include "heatlab/bm_sim.hpp"
#include "heatlab/common.hpp"
#include "heatlab/faber_krahn.hpp"
#include "heatlab/spectral.hpp"
#include "heatlab/walk.hpp"

namespace heatlab {

/// One CSV artifact: '#'-prefixed "key: value" metadata lines in order,
/// one header row, then data rows. Cells are kept as written, so
/// parse_csv followed by write_csv reproduces any write_csv output byte
/// for byte.
struct CsvDocument {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const CsvDocument&) const = default;
};

/// Canonical serialization. Rejects cells or keys containing the
/// separator, and rows whose width differs from the header.
std::string write_csv(const CsvDocument& doc);

/// Inverse of write_csv; rejects malformed comments, ragged rows, and
/// text without a header row.
CsvDocument parse_csv(const std::string& text);

/// Exact return-time law; pmf and alive columns are rationals.
CsvDocument csv_hitting(const HittingDistribution<Rational>& d,
                        const std::string& graph_id,
                        const std::string& start_id);

/// Long-form alpha table: one row per (t, n) pair.
CsvDocument csv_alpha(const AlphaTable& table);

/// Eigenvalues and constant-function overlaps with their error bounds.
CsvDocument csv_spectral(const SpectralData& s, const std::string& graph_id);

/// Heat-content curve of any route, tagged with its provenance.
CsvDocument csv_curve(const MethodCurve& c);

/// Monte Carlo survival curve with binomial standard errors.
CsvDocument csv_survival(const SurvivalEstimate& e,
                         const std::string& graph_id);

/// Certified comparison series Q(a) - Q(b) on a shared grid.
CsvDocument csv_comparison(const std::string& id_a, const std::string& id_b,
                           Convention conv, const std::vector<double>& t_grid,
                           const std::vector<ValueWithBound>& diff);

}  // namespace heatlab
