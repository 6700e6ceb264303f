#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>

#include "chromatex/error.hpp"
#include "chromatex/protocol.hpp"

namespace chromatex {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string rpad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

// Renders rows of cells with columns sized to their widest entry; the first
// column is left-aligned, the rest right-aligned.
std::string render(const std::vector<std::vector<std::string>>& table) {
  std::vector<std::size_t> width;
  for (const auto& row : table) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < table[r].size(); ++c) {
      if (c > 0) line += " | ";
      line += c == 0 ? pad(table[r][c], width[c]) : rpad(table[r][c], width[c]);
    }
    out += line + '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c > 0 ? 3 : 0);
      out += std::string(total, '-') + '\n';
    }
  }
  return out;
}

std::string percent(double v) { return std::isnan(v) ? "-" : fmt("%.2f", 100.0 * v); }

std::string intra_table(const Report& report) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"Method", "Kernel"};
  for (const auto& s : report.scenarios) header.push_back(s);
  header.push_back("HTER");
  header.push_back("Tuning EER");
  table.push_back(header);

  // Rows keep first-appearance order of (descriptor, kernel).
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::map<std::string, const ReportRow*>> cells;
  for (const auto& row : report.rows) {
    const auto key = std::make_pair(row.descriptor, row.kernel);
    if (!cells.count(key)) order.push_back(key);
    cells[key][row.scenario] = &row;
  }
  for (const auto& key : order) {
    const auto& by_scenario = cells[key];
    std::vector<std::string> line{key.first + "-LBP", key.second};
    const ReportRow* any = by_scenario.begin()->second;
    for (const auto& s : report.scenarios) {
      const auto it = by_scenario.find(s);
      line.push_back(it == by_scenario.end() ? "-" : percent(it->second->eer));
    }
    const auto overall = by_scenario.find("overall");
    line.push_back(overall == by_scenario.end() ? "-" : percent(overall->second->hter));
    line.push_back(percent(any->tuning_eer) + " (" + any->threshold_source + ")");
    table.push_back(line);
  }
  return "EER % per scenario on the test split; HTER % (overall) at the tuned threshold\n\n" +
         render(table);
}

std::string cross_table(const Report& report) {
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> cells;
  for (const auto& row : report.rows) {
    const std::string col = row.corpus + " " + row.split;
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
    const auto key = std::make_pair(row.descriptor, row.kernel);
    if (!cells.count(key)) order.push_back(key);
    cells[key][col] = row.hter;
  }
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"Method"};
  header.insert(header.end(), columns.begin(), columns.end());
  table.push_back(header);
  for (const auto& key : order) {
    std::vector<std::string> line{key.first + "-LBP (SVM-" + key.second + ")"};
    for (const auto& c : columns) {
      const auto it = cells[key].find(c);
      line.push_back(it == cells[key].end() ? "-" : percent(it->second));
    }
    table.push_back(line);
  }
  return "Cross-corpus HTER % at thresholds fixed on the training corpus\n\n" + render(table);
}

}  // namespace

std::string format_table(const Report& report) {
  return report.kind == ReportKind::Intra ? intra_table(report) : cross_table(report);
}

std::string format_csv(const Report& report) {
  std::string out =
      "descriptor,kernel,corpus,split,scenario,n_genuine,n_attack,eer,eer_threshold,hter,"
      "threshold,threshold_source,tuning_eer,C,gamma\n";
  for (const auto& r : report.rows) {
    out += r.descriptor + ',' + r.kernel + ',' + r.corpus + ',' + r.split + ',' + r.scenario + ',' +
           std::to_string(r.n_genuine) + ',' + std::to_string(r.n_attack) + ',' +
           fmt("%.6f", r.eer) + ',' + fmt("%.10g", r.eer_threshold) + ',' + fmt("%.6f", r.hter) +
           ',' + fmt("%.10g", r.threshold) + ',' + r.threshold_source + ',' +
           fmt("%.6f", r.tuning_eer) + ',' + fmt("%g", r.C) + ',' + fmt("%g", r.gamma) + '\n';
  }
  return out;
}

std::string format_roc(const Report& report) {
  std::string out = "descriptor,kernel,corpus,split,threshold,far,frr\n";
  for (const auto& c : report.curves) {
    const std::string prefix = c.descriptor + ',' + c.kernel + ',' + c.corpus + ',' + c.split + ',';
    for (const auto& p : c.points) {
      out += prefix + fmt("%.10g", p.threshold) + ',' + fmt("%.6f", p.far) + ',' +
             fmt("%.6f", p.frr) + '\n';
    }
  }
  return out;
}

void write_report(const std::filesystem::path& dir, const Report& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  const std::pair<const char*, std::string> files[] = {{"report.txt", format_table(report)},
                                                       {"report.csv", format_csv(report)},
                                                       {"roc.csv", format_roc(report)}};
  for (const auto& [name, text] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open " + (dir / name).string() + " for writing");
    out << text;
    if (!out) fail(ErrorCode::IoError, "failed writing " + (dir / name).string());
  }
}

}  // namespace chromatex
