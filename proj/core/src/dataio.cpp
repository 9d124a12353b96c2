// Copyright 2026 The ValleyForge Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "valleyforge/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "valleyforge/error.hpp"
#include "valleyforge/rng.hpp"

namespace valleyforge {

namespace {

enum class ColumnKind { Numeric, Boolean, Sex, WorkType, Residence, Smoking };

struct ColumnSpec {
  std::string name;
  ColumnKind kind;
};

struct SchemaSpec {
  std::vector<ColumnSpec> features;
  std::vector<ColumnSpec> labels;
};

const SchemaSpec& covid_schema() {
  static const SchemaSpec spec{
      {{"age", ColumnKind::Numeric},
       {"sex", ColumnKind::Sex},
       {"fever", ColumnKind::Boolean},
       {"headache", ColumnKind::Boolean},
       {"cough", ColumnKind::Boolean}},
      {{"covid", ColumnKind::Boolean}}};
  return spec;
}

const SchemaSpec& stroke_schema() {
  static const SchemaSpec spec{
      {{"gender", ColumnKind::Sex},
       {"age", ColumnKind::Numeric},
       {"hypertension", ColumnKind::Boolean},
       {"heart_disease", ColumnKind::Boolean},
       {"ever_married", ColumnKind::Boolean},
       {"work_type", ColumnKind::WorkType},
       {"Residence_type", ColumnKind::Residence},
       {"avg_glucose_level", ColumnKind::Numeric},
       {"bmi", ColumnKind::Numeric},
       {"smoking_status", ColumnKind::Smoking}},
      {{"stroke", ColumnKind::Boolean}}};
  return spec;
}

const std::map<std::string, double>& dictionary(ColumnKind kind) {
  static const std::map<std::string, double> boolean{
      {"0", 0}, {"1", 1}, {"no", 0}, {"yes", 1}, {"false", 0},
      {"true", 1}, {"negative", 0}, {"positive", 1}};
  static const std::map<std::string, double> sex{
      {"0", 0}, {"1", 1}, {"2", 2}, {"female", 0}, {"male", 1}, {"other", 2},
      {"f", 0}, {"m", 1}};
  static const std::map<std::string, double> work{
      {"0", 0}, {"1", 1}, {"2", 2}, {"3", 3}, {"4", 4},
      {"children", 0}, {"govt_job", 1}, {"never_worked", 2},
      {"private", 3}, {"self-employed", 4}};
  static const std::map<std::string, double> residence{
      {"0", 0}, {"1", 1}, {"rural", 0}, {"urban", 1}};
  static const std::map<std::string, double> smoking{
      {"0", 0}, {"1", 1}, {"2", 2}, {"3", 3},
      {"never smoked", 0}, {"formerly smoked", 1}, {"smokes", 2}, {"unknown", 3}};
  static const std::map<std::string, double> none;
  switch (kind) {
    case ColumnKind::Boolean: return boolean;
    case ColumnKind::Sex: return sex;
    case ColumnKind::WorkType: return work;
    case ColumnKind::Residence: return residence;
    case ColumnKind::Smoking: return smoking;
    case ColumnKind::Numeric: break;
  }
  return none;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  const std::string l = lower(cell);
  return l == "n/a" || l == "na" || l == "nan" || l == "?";
}

std::optional<double> parse_number(const std::string& cell) {
  double v = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Splits one CSV record; double quotes group commas and "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      // UTF-8 byte order mark
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      first = false;
    }
    if (trim(line).empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct BoundColumn {
  std::size_t index;  // position in the CSV header
  ColumnSpec spec;
};

std::optional<double> decode_cell(const std::string& cell, const BoundColumn& col,
                                  std::size_t line_no) {
  if (is_missing(cell)) return std::nullopt;
  if (col.spec.kind == ColumnKind::Numeric) {
    if (auto v = parse_number(cell)) return v;
    fail(ErrorCode::UnmappableCategory, "column '" + col.spec.name + "' line " +
                                            std::to_string(line_no) +
                                            ": non-numeric value '" + cell + "'");
  }
  const auto& dict = dictionary(col.spec.kind);
  if (auto it = dict.find(lower(cell)); it != dict.end()) return it->second;
  // Accept integral spellings such as "1.0" for coded columns.
  if (auto v = parse_number(cell)) {
    for (const auto& [key, code] : dict) {
      if (code == *v) return code;
    }
  }
  fail(ErrorCode::UnmappableCategory, "column '" + col.spec.name + "' line " +
                                          std::to_string(line_no) + ": value '" + cell +
                                          "' not in dictionary");
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  const std::string want = lower(name);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(header[i]) == want) return i;
  }
  fail(ErrorCode::MissingColumn, "required column '" + name + "' not found");
}

}  // namespace

void RecordTable::validate() const {
  const std::size_t n = features.rows();
  if (n == 0 || features.cols() == 0 || labels.cols() == 0)
    fail(ErrorCode::BadShape, "table needs N>=1, D>=1, K>=1");
  if (labels.rows() != n) fail(ErrorCode::BadShape, "label rows differ from feature rows");
  if (feature_names.size() != features.cols() || label_names.size() != labels.cols())
    fail(ErrorCode::BadShape, "column name count mismatch");
  for (double v : features.data()) {
    if (!std::isfinite(v)) fail(ErrorCode::BadShape, "non-finite feature cell");
  }
  for (double v : labels.data()) {
    if (v != 0.0 && v != 1.0) fail(ErrorCode::BadShape, "label cell not 0/1");
  }
}

RecordTable RecordTable::select_rows(const std::vector<std::size_t>& indices) const {
  RecordTable out;
  out.features = Matrix(indices.size(), width());
  out.labels = Matrix(indices.size(), heads());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    std::ranges::copy(features.row(indices[r]), out.features.row(r).begin());
    std::ranges::copy(labels.row(indices[r]), out.labels.row(r).begin());
  }
  out.feature_names = feature_names;
  out.label_names = label_names;
  out.schema_id = schema_id;
  return out;
}

RecordTable RecordTable::select_columns(const std::vector<bool>& keep) const {
  if (keep.size() != width())
    fail(ErrorCode::DimensionMismatch, "column mask length differs from table width");
  std::vector<std::size_t> cols;
  for (std::size_t d = 0; d < keep.size(); ++d) {
    if (keep[d]) cols.push_back(d);
  }
  RecordTable out;
  out.features = Matrix(rows(), cols.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) out.features(r, j) = features(r, cols[j]);
  }
  for (std::size_t c : cols) out.feature_names.push_back(feature_names[c]);
  out.labels = labels;
  out.label_names = label_names;
  out.schema_id = schema_id;
  return out;
}

RecordTable load_table(const std::filesystem::path& path, std::string_view schema_id,
                       LoadReport* report, const LoadOptions& options) {
  if (!std::filesystem::exists(path))
    fail(ErrorCode::IoError, "file not found: " + path.string());
  const auto rows = read_csv(path);
  if (rows.size() < 2) fail(ErrorCode::EmptyFile, path.string() + " has no data rows");
  const auto& header = rows.front();

  // Absent optional label columns point past the end of every row, so their
  // cells read as missing.
  const std::size_t absent = header.size();
  LoadReport rep;
  std::vector<BoundColumn> feature_cols;
  std::vector<BoundColumn> label_cols;
  if (schema_id == "covid" || schema_id == "stroke") {
    const SchemaSpec& spec = schema_id == "covid" ? covid_schema() : stroke_schema();
    for (const auto& c : spec.features) feature_cols.push_back({find_column(header, c.name), c});
    for (const auto& c : spec.labels) {
      try {
        label_cols.push_back({find_column(header, c.name), c});
      } catch (const Error&) {
        if (!options.labels_optional) throw;
        label_cols.push_back({absent, c});
        rep.labels_absent = true;
      }
    }
  } else if (schema_id == "generic") {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i].rfind("label:", 0) == 0) {
        label_cols.push_back({i, {header[i].substr(6), ColumnKind::Boolean}});
      } else {
        feature_cols.push_back({i, {header[i], ColumnKind::Numeric}});
      }
    }
    if (label_cols.empty() && options.labels_optional) {
      label_cols.push_back({absent, {"label", ColumnKind::Boolean}});
      rep.labels_absent = true;
    }
    if (label_cols.empty())
      fail(ErrorCode::MissingColumn, "generic schema needs at least one 'label:<name>' column");
    if (feature_cols.empty()) fail(ErrorCode::MissingColumn, "no feature columns");
  } else {
    fail(ErrorCode::ConfigInvalid, "unknown schema '" + std::string(schema_id) + "'");
  }

  const std::size_t d = feature_cols.size();
  const std::size_t k = label_cols.size();
  std::vector<std::vector<std::optional<double>>> kept_features;
  std::vector<std::vector<double>> kept_labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    ++rep.rows_read;
    auto cell = [&](std::size_t idx) -> std::string {
      return idx < cells.size() ? cells[idx] : std::string();
    };
    std::vector<double> lab(k);
    bool drop = false;
    for (std::size_t j = 0; j < k; ++j) {
      auto v = decode_cell(cell(label_cols[j].index), label_cols[j], r + 1);
      if (!v && options.labels_optional) v = 0.0;
      if (!v) {
        drop = true;
        break;
      }
      if (*v != 0.0 && *v != 1.0)
        fail(ErrorCode::UnmappableCategory, "label '" + label_cols[j].spec.name + "' line " +
                                                std::to_string(r + 1) + " is not 0/1");
      lab[j] = *v;
    }
    if (drop) {
      ++rep.rows_dropped;
      continue;
    }
    std::vector<std::optional<double>> feat(d);
    for (std::size_t j = 0; j < d; ++j) feat[j] = decode_cell(cell(feature_cols[j].index), feature_cols[j], r + 1);
    kept_features.push_back(std::move(feat));
    kept_labels.push_back(std::move(lab));
  }
  if (kept_features.empty())
    fail(ErrorCode::AllRowsDropped, "every row of " + path.string() + " lacks a label");

  const std::size_t n = kept_features.size();
  RecordTable table;
  table.features = Matrix(n, d);
  table.labels = Matrix(n, k);
  table.schema_id = std::string(schema_id);
  for (const auto& c : feature_cols) table.feature_names.push_back(c.spec.name);
  for (const auto& c : label_cols) table.label_names.push_back(c.spec.name);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> present;
    for (std::size_t r = 0; r < n; ++r) {
      if (kept_features[r][j]) present.push_back(*kept_features[r][j]);
    }
    const double fill = median(present);
    for (std::size_t r = 0; r < n; ++r) {
      if (kept_features[r][j]) {
        table.features(r, j) = *kept_features[r][j];
      } else {
        table.features(r, j) = fill;
        ++rep.cells_imputed;
      }
    }
  }
  for (std::size_t r = 0; r < n; ++r) std::ranges::copy(kept_labels[r], table.labels.row(r).begin());
  if (report) *report = rep;
  return table;
}

void save_table(const RecordTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  bool first = true;
  for (const auto& name : table.feature_names) {
    out << (first ? "" : ",") << name;
    first = false;
  }
  for (const auto& name : table.label_names) out << ",label:" << name;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.width(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", table.features(r, c));
      out << (c ? "," : "") << buf;
    }
    for (std::size_t c = 0; c < table.heads(); ++c) out << ',' << static_cast<int>(table.labels(r, c));
    out << '\n';
  }
}

NormalizationStats fit_normalizer(const RecordTable& table) {
  const std::size_t n = table.rows();
  const std::size_t d = table.width();
  if (n == 0) fail(ErrorCode::EmptyTable, "cannot fit normalizer on an empty table");
  NormalizationStats stats;
  stats.mu.assign(d, 0.0);
  stats.sigma.assign(d, 0.0);
  stats.constant_mask.assign(d, false);
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    double lo = table.features(0, c), hi = lo;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = table.features(r, c);
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mean = sum / static_cast<double>(n);
    stats.mu[c] = mean;
    if (lo == hi) {
      stats.constant_mask[c] = true;
      continue;
    }
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double dv = table.features(r, c) - mean;
      ss += dv * dv;
    }
    stats.sigma[c] = std::sqrt(ss / static_cast<double>(n));
    if (stats.sigma[c] == 0.0) stats.constant_mask[c] = true;
  }
  return stats;
}

RecordTable apply_normalizer(const RecordTable& table, const NormalizationStats& stats) {
  const std::size_t d = table.width();
  if (stats.mu.size() != d || stats.sigma.size() != d || stats.constant_mask.size() != d)
    fail(ErrorCode::DimensionMismatch, "normalizer has " + std::to_string(stats.mu.size()) +
                                           " columns, table has " + std::to_string(d));
  RecordTable out = table;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.features.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      row[c] = stats.constant_mask[c] ? 0.0 : (row[c] - stats.mu[c]) / stats.sigma[c];
    }
  }
  return out;
}

SplitResult stratified_split(const RecordTable& table, double test_fraction,
                             std::uint64_t seed) {
  if (table.rows() < 2) fail(ErrorCode::DegenerateSplit, "need at least two rows to split");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    fail(ErrorCode::ConfigInvalid, "test_fraction must lie in (0,1)");
  SplitResult result;
  std::vector<std::size_t> by_class[2];
  for (std::size_t r = 0; r < table.rows(); ++r)
    by_class[table.labels(r, 0) != 0.0 ? 1 : 0].push_back(r);
  for (int cls = 0; cls < 2; ++cls) {
    auto& members = by_class[cls];
    if (members.empty()) continue;
    if (members.size() == 1) {
      result.warnings.push_back("class " + std::to_string(cls) +
                                " has a single member; kept in train");
      result.train_rows.push_back(members.front());
      continue;
    }
    Engine eng = make_engine(seed, {static_cast<std::uint64_t>(cls)});
    shuffle(members.begin(), members.end(), eng);
    const auto n_test = static_cast<std::size_t>(
        std::llround(static_cast<double>(members.size()) * test_fraction));
    for (std::size_t i = 0; i < members.size(); ++i)
      (i < n_test ? result.test_rows : result.train_rows).push_back(members[i]);
  }
  if (result.train_rows.empty() || result.test_rows.empty())
    fail(ErrorCode::DegenerateSplit, "split leaves an empty side (train=" +
                                         std::to_string(result.train_rows.size()) + ", test=" +
                                         std::to_string(result.test_rows.size()) + ")");
  std::ranges::sort(result.train_rows);
  std::ranges::sort(result.test_rows);
  result.train = table.select_rows(result.train_rows);
  result.test = table.select_rows(result.test_rows);
  return result;
}

RecordTable synth_generate(const SynthSpec& spec) {
  if (spec.n < 4 || spec.n % 2 != 0)
    fail(ErrorCode::BadShape, "n must be an even number >= 4");
  if (spec.informative < 1) fail(ErrorCode::BadShape, "need at least one informative feature");
  if (!(spec.delta > 0.0)) fail(ErrorCode::BadShape, "delta must be positive");

  const std::size_t d = spec.informative + spec.noise;
  Engine eng = make_engine(spec.seed);
  std::vector<double> y(spec.n, 0.0);
  std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(spec.n / 2), 1.0);
  shuffle(y.begin(), y.end(), eng);

  RecordTable t;
  t.features = Matrix(spec.n, d);
  t.labels = Matrix(spec.n, 1);
  t.schema_id = "generic";
  for (std::size_t c = 0; c < d; ++c) t.feature_names.push_back("x" + std::to_string(c));
  t.label_names = {"y"};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t r = 0; r < spec.n; ++r) {
    t.labels(r, 0) = y[r];
    const double shift = (y[r] == 1.0 ? 0.5 : -0.5) * spec.delta;
    for (std::size_t c = 0; c < d; ++c) {
      const double z = normal(eng);
      t.features(r, c) = c < spec.informative ? z + shift : z;
    }
  }
  return t;
}

}  // namespace valleyforge
