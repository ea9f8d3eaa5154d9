#include "wmplace/report.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

#include "wmplace/errors.hpp"
#include "wmplace/metrics.hpp"

namespace wmp {

namespace {

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double number(const std::string &v, const std::string &what) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception &) {
    throw CorruptDocument("column " + what + ": '" + v + "' is not a number");
  }
}

const std::string &field(const CsvTable &t, const std::vector<std::string> &row, const std::string &name) {
  int c = t.column(name);
  if (c < 0) throw CorruptDocument("missing column " + name);
  return row[static_cast<std::size_t>(c)];
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

bool has_columns(const CsvTable &t, std::initializer_list<const char *> names) {
  for (const char *n : names) {
    if (t.column(n) < 0) return false;
  }
  return true;
}

}  // namespace

int CsvTable::column(const std::string &name) const {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable parse_csv(const std::string &text) {
  CsvTable t;
  std::istringstream s(text);
  std::string line;
  int n = 0;
  while (std::getline(s, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
    } else if (cells.size() != t.header.size()) {
      throw CorruptDocument("csv line " + std::to_string(n) + " has " + std::to_string(cells.size()) +
                            " fields, header has " + std::to_string(t.header.size()));
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

std::string format_csv(const CsvTable &table) {
  std::string out;
  auto line = [&](const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto &r : table.rows) line(r);
  return out;
}

bool is_attack_csv(const CsvTable &t) {
  return has_columns(t, {"scheme", "attack", "param", "seed", "pwlr", "wer_gw", "wer_dw", "wer", "success"});
}

bool is_eval_csv(const CsvTable &t) {
  return has_columns(t, {"design", "scheme", "stage", "hpwl", "pwlr", "wer", "legal", "bits"});
}

CsvTable attack_table(const std::vector<CsvTable> &inputs) {
  struct Group {
    std::vector<double> pwlr, wer, wer_gw, wer_dw;
    int successes = 0;
  };
  std::map<std::tuple<std::string, std::string, std::string>, Group> groups;
  for (const CsvTable &t : inputs) {
    if (!is_attack_csv(t)) continue;
    for (const auto &row : t.rows) {
      Group &g = groups[{field(t, row, "scheme"), field(t, row, "attack"), field(t, row, "param")}];
      g.pwlr.push_back(number(field(t, row, "pwlr"), "pwlr"));
      g.wer.push_back(number(field(t, row, "wer"), "wer"));
      const std::string &gw = field(t, row, "wer_gw");
      const std::string &dw = field(t, row, "wer_dw");
      if (!gw.empty()) g.wer_gw.push_back(number(gw, "wer_gw"));
      if (!dw.empty()) g.wer_dw.push_back(number(dw, "wer_dw"));
      g.successes += field(t, row, "success") == "1";
    }
  }
  CsvTable out;
  out.header = {"scheme",     "attack",     "param",   "trials",     "pwlr_mean",
                "wer_gw_min", "wer_dw_min", "wer_min", "wer_median", "successes"};
  auto min_of = [](const std::vector<double> &v) {
    return v.empty() ? std::string() : format_real(*std::min_element(v.begin(), v.end()), 4);
  };
  for (const auto &[key, g] : groups) {
    double mean = 0.0;
    for (double v : g.pwlr) mean += v;
    mean /= static_cast<double>(g.pwlr.size());
    out.rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::to_string(g.pwlr.size()),
                        format_real(mean), min_of(g.wer_gw), min_of(g.wer_dw), min_of(g.wer),
                        format_real(median(g.wer), 4), std::to_string(g.successes)});
  }
  return out;
}

CsvTable capacity_table(const std::vector<CsvTable> &inputs, const ReportThresholds &th) {
  struct Group {
    std::vector<double> pwlr, wer;
    bool all_legal = true;
  };
  std::map<std::tuple<std::string, std::string, long>, Group> groups;
  for (const CsvTable &t : inputs) {
    if (!is_eval_csv(t)) continue;
    for (const auto &row : t.rows) {
      if (field(t, row, "stage") != "watermarked") continue;
      long bits = static_cast<long>(number(field(t, row, "bits"), "bits"));
      Group &g = groups[{field(t, row, "design"), field(t, row, "scheme"), bits}];
      g.pwlr.push_back(number(field(t, row, "pwlr"), "pwlr"));
      g.wer.push_back(number(field(t, row, "wer"), "wer"));
      g.all_legal = g.all_legal && field(t, row, "legal") == "1";
    }
  }
  CsvTable out;
  out.header = {"design", "scheme", "bits", "runs", "pwlr_max", "wer_min", "sustained"};
  for (const auto &[key, g] : groups) {
    double worst_pwlr = *std::max_element(g.pwlr.begin(), g.pwlr.end());
    double worst_wer = *std::min_element(g.wer.begin(), g.wer.end());
    bool ok = g.all_legal && worst_pwlr <= th.pwlr_max && worst_wer >= th.wer_min;
    out.rows.push_back({std::get<0>(key), std::get<1>(key), std::to_string(std::get<2>(key)),
                        std::to_string(g.pwlr.size()), format_real(worst_pwlr), format_real(worst_wer, 4),
                        ok ? "1" : "0"});
  }
  return out;
}

CsvTable capacity_summary(const CsvTable &capacity) {
  std::map<std::pair<std::string, std::string>, std::pair<long, std::vector<std::string>>> best;
  for (const auto &row : capacity.rows) {
    auto &b = best[{field(capacity, row, "design"), field(capacity, row, "scheme")}];
    const std::string &bits = field(capacity, row, "bits");
    b.second.push_back(bits);
    if (field(capacity, row, "sustained") == "1") {
      b.first = std::max(b.first, static_cast<long>(number(bits, "bits")));
    }
  }
  CsvTable out;
  out.header = {"design", "scheme", "capacity", "lengths_tested"};
  for (const auto &[key, b] : best) {
    std::string lengths;
    for (const std::string &l : b.second) lengths += (lengths.empty() ? "" : " ") + l;
    out.rows.push_back({key.first, key.second, std::to_string(b.first), lengths});
  }
  return out;
}

}  // namespace wmp
