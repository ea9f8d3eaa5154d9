#pragma once

#include <string>
#include <vector>

namespace wmp {

// Plain comma-separated table: no quoting, first row is the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string &name) const;  // -1 when absent
};

CsvTable parse_csv(const std::string &text);  // throws CorruptDocument on ragged rows
std::string format_csv(const CsvTable &table);

struct ReportThresholds {
  double pwlr_max = 1.005;
  double wer_min = 90.0;
};

// Attack-sweep rows (the attack outcome CSV) grouped by (scheme, attack,
// param), groups in lexicographic order.
CsvTable attack_table(const std::vector<CsvTable> &inputs);

// Evaluation rows at stage "watermarked" grouped by (design, scheme, bits).
// A length is sustained when every run is legal, meets pwlr_max and
// extracts at least wer_min.
CsvTable capacity_table(const std::vector<CsvTable> &inputs, const ReportThresholds &t);
// Longest sustained length per (design, scheme); 0 when none.
CsvTable capacity_summary(const CsvTable &capacity);

bool is_attack_csv(const CsvTable &t);
bool is_eval_csv(const CsvTable &t);

}  // namespace wmp
