#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "moseac/errors.hpp"
#include "moseac/num.hpp"
#include "moseac/svg.hpp"

namespace moseac {

struct MetricsTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return static_cast<int>(i);
    }
    throw parse_error("metrics CSV has no column '" + name + "'");
  }

  std::vector<double> values(const std::string& name) const {
    const int c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

inline MetricsTable read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read metrics CSV: " + path.string());
  MetricsTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (line_no == 1) {
      while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
      if (table.columns.empty()) {
        throw parse_error(path.string() + ":1: empty header");
      }
      continue;
    }
    std::vector<double> row;
    row.reserve(table.columns.size());
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(parse_double(cell));
      } catch (const parse_error&) {
        throw parse_error(path.string() + ":" + std::to_string(line_no) +
                          ": bad numeric cell '" + cell + "'");
      }
    }
    if (row.size() != table.columns.size()) {
      throw parse_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(table.columns.size()) + " cells, got " +
                        std::to_string(row.size()));
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw parse_error(path.string() + ": empty file");
  return table;
}

// Episode-return and episode-steps training curves (multiple runs overlay)
// smoothed with a trailing moving average, stacked into one SVG document.
inline void plot_curves(const std::vector<std::filesystem::path>& metrics_csvs,
                        const std::vector<std::string>& labels,
                        const std::filesystem::path& out_svg, int window = 100) {
  if (metrics_csvs.empty()) throw config_error("plot_curves: no input CSVs");
  if (labels.size() != metrics_csvs.size()) {
    throw config_error("plot_curves: need one label per CSV");
  }
  std::vector<Series> returns, steps;
  for (std::size_t i = 0; i < metrics_csvs.size(); ++i) {
    const MetricsTable t = read_metrics_csv(metrics_csvs[i]);
    const std::vector<double> gs = t.values("global_step");
    const std::vector<double> ret = moving_average(t.values("ep_return"), window);
    const std::vector<double> st = moving_average(t.values("ep_steps"), window);
    const std::size_t skip = gs.size() - ret.size();  // windows are trailing
    Series sr{labels[i], {gs.begin() + skip, gs.end()}, ret};
    Series ss{labels[i], {gs.begin() + skip, gs.end()}, st};
    returns.push_back(std::move(sr));
    steps.push_back(std::move(ss));
  }
  const int w = 960, h = 420;
  std::string doc;
  doc += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
         "\" height=\"" + std::to_string(2 * h) + "\">\n";
  doc += "<g>" + render_line_chart("Episode return (moving avg " + std::to_string(window) +
                                   ")", "environment steps", "return", returns, w, h) +
         "</g>\n";
  doc += "<g transform=\"translate(0," + std::to_string(h) + ")\">" +
         render_line_chart("Episode steps / energy (moving avg " + std::to_string(window) +
                           ")", "environment steps", "steps", steps, w, h) +
         "</g>\n";
  doc += "</svg>\n";
  std::ofstream out(out_svg, std::ios::trunc);
  if (!out) throw io_error("cannot write SVG: " + out_svg.string());
  out << doc;
}

}  // namespace moseac
