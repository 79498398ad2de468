#include "heatlab/csv.hpp"

#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>

namespace heatlab {

namespace {

void check_field(const std::string& s, const char* what) {
  for (char c : s)
    if (c == ',' || c == '\n' || c == '\r')
      throw input_error(std::string("write_csv: ") + what +
                        " contains a separator: '" + s + "'");
}

std::string rational_str(const Rational& r) { return r.str(); }

std::string bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string write_csv(const CsvDocument& doc) {
  if (doc.columns.empty()) throw input_error("write_csv: no header columns");
  std::string out;
  for (const auto& [key, value] : doc.meta) {
    if (key.empty()) throw input_error("write_csv: empty metadata key");
    check_field(key, "metadata key");
    if (key.find(':') != std::string::npos)
      throw input_error("write_csv: metadata key contains ':'");
    if (value.find('\n') != std::string::npos ||
        value.find('\r') != std::string::npos)
      throw input_error("write_csv: metadata value contains a newline");
    out += "# ";
    out += key;
    out += ": ";
    out += value;
    out += '\n';
  }
  for (std::size_t c = 0; c < doc.columns.size(); ++c) {
    check_field(doc.columns[c], "column name");
    if (c) out += ',';
    out += doc.columns[c];
  }
  out += '\n';
  for (const auto& row : doc.rows) {
    if (row.size() != doc.columns.size())
      throw input_error("write_csv: row width differs from the header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      check_field(row[c], "cell");
      if (c) out += ',';
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

CsvDocument parse_csv(const std::string& text) {
  CsvDocument doc;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) {
      if (pos >= text.size()) break;
      throw input_error("parse_csv: blank line inside the document");
    }
    if (line[0] == '#') {
      if (header_seen)
        throw input_error("parse_csv: comment after the header row");
      if (line.size() < 2 || line[1] != ' ')
        throw input_error("parse_csv: comment must start with '# '");
      const std::string_view body = line.substr(2);
      const std::size_t sep = body.find(": ");
      if (sep == std::string_view::npos)
        throw input_error("parse_csv: comment is not a 'key: value' pair");
      doc.meta.emplace_back(std::string(body.substr(0, sep)),
                            std::string(body.substr(sep + 2)));
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        cells.emplace_back(line.substr(start));
        break;
      }
      cells.emplace_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (!header_seen) {
      doc.columns = std::move(cells);
      header_seen = true;
    } else {
      if (cells.size() != doc.columns.size())
        throw input_error("parse_csv: row width differs from the header");
      doc.rows.push_back(std::move(cells));
    }
  }
  if (!header_seen) throw input_error("parse_csv: missing header row");
  return doc;
}

CsvDocument csv_hitting(const HittingDistribution<Rational>& d,
                        const std::string& graph_id,
                        const std::string& start_id) {
  CsvDocument doc;
  doc.meta = {{"artifact", "walk"},
              {"graph", graph_id},
              {"start", start_id},
              {"n_max", std::to_string(d.n_max)},
              {"tail_mass", rational_str(d.tail_mass)},
              {"tail_sum_bound", rational_str(d.tail_sum_bound)},
              {"truncation_warning", bool_str(d.truncation_warning)}};
  doc.columns = {"k", "pmf", "alive"};
  for (int k = 0; k <= d.n_max; ++k)
    doc.rows.push_back({std::to_string(k), rational_str(d.pmf[k]),
                        rational_str(d.alive[k])});
  return doc;
}

CsvDocument csv_alpha(const AlphaTable& table) {
  CsvDocument doc;
  doc.meta = {{"artifact", "alpha-table"},
              {"edge_length", format_double(table.common_length)},
              {"convention", convention_name(table.convention)},
              {"n_max", std::to_string(table.n_max)},
              {"grid_resolution", std::to_string(table.grid_resolution)},
              {"window", format_double(table.window)},
              {"flag_tolerance", format_double(table.flag_tolerance)},
              {"density_mass_x0", format_double(table.density_mass_x0)},
              {"density_mass_increment",
               format_double(table.density_mass_increment)}};
  doc.columns = {"t", "n", "value", "error"};
  for (std::size_t i = 0; i < table.t_grid.size(); ++i)
    for (int n = 0; n <= table.n_max; ++n)
      doc.rows.push_back({format_double(table.t_grid[i]), std::to_string(n),
                          format_double(table.values[i][n]),
                          format_double(table.error[i][n])});
  return doc;
}

CsvDocument csv_spectral(const SpectralData& s, const std::string& graph_id) {
  CsvDocument doc;
  doc.meta = {{"artifact", "spectral"},
              {"graph", graph_id},
              {"mesh_size", format_double(s.mesh_size)},
              {"total_length", format_double(s.total_length)},
              {"modes", std::to_string(s.count())}};
  doc.columns = {"k", "eigenvalue", "eigenvalue_error", "overlap",
                 "overlap_error"};
  for (int k = 0; k < s.count(); ++k) {
    const double oe =
        k < static_cast<int>(s.overlap_error.size()) ? s.overlap_error[k]
                                                     : 0.0;
    doc.rows.push_back({std::to_string(k + 1),
                        format_double(s.eigenvalues[k]),
                        format_double(s.eigenvalue_error[k]),
                        format_double(s.overlaps[k]), format_double(oe)});
  }
  return doc;
}

CsvDocument csv_curve(const MethodCurve& c) {
  CsvDocument doc;
  doc.meta = {{"artifact", "heat-content"},
              {"graph", c.graph_id},
              {"method", method_name(c.method)}};
  if (!c.convention.empty()) doc.meta.emplace_back("convention", c.convention);
  if (!c.truncation.empty()) doc.meta.emplace_back("truncation", c.truncation);
  doc.columns = {"t", "value", "error"};
  for (std::size_t i = 0; i < c.curve.t_grid.size(); ++i)
    doc.rows.push_back({format_double(c.curve.t_grid[i]),
                        format_double(c.curve.values[i]),
                        format_double(c.curve.error[i])});
  return doc;
}

CsvDocument csv_survival(const SurvivalEstimate& e,
                         const std::string& graph_id) {
  CsvDocument doc;
  doc.meta = {{"artifact", "mc-survival"},
              {"graph", graph_id},
              {"time_step", format_double(e.config.time_step)},
              {"horizon", format_double(e.config.horizon)},
              {"samples", std::to_string(e.config.samples)},
              {"seed", std::to_string(e.config.seed)},
              {"scale", e.config.generator_scale == GeneratorScale::FULL
                            ? "full"
                            : "half"}};
  doc.columns = {"t", "survival", "std_error"};
  for (std::size_t i = 0; i < e.t_grid.size(); ++i)
    doc.rows.push_back({format_double(e.t_grid[i]),
                        format_double(e.survival[i]),
                        format_double(e.std_error[i])});
  return doc;
}

CsvDocument csv_comparison(const std::string& id_a, const std::string& id_b,
                           Convention conv, const std::vector<double>& t_grid,
                           const std::vector<ValueWithBound>& diff) {
  if (t_grid.size() != diff.size())
    throw input_error("csv_comparison: grid and series sizes differ");
  CsvDocument doc;
  doc.meta = {{"artifact", "comparison"},
              {"graph", id_a},
              {"reference", id_b},
              {"convention", convention_name(conv)}};
  doc.columns = {"t", "difference", "bound"};
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    doc.rows.push_back({format_double(t_grid[i]),
                        format_double(diff[i].value),
                        format_double(diff[i].bound)});
  return doc;
}

}  // namespace heatlab
