//
// Copyright 2026 The trustml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trustml/equity.hpp"
#include "trustml/triage.hpp"

namespace trustml::data_io {

enum class ColumnKind { numeric, categorical, text };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::text;
  bool required = true;
  std::optional<double> min_value;          // numeric columns
  std::optional<double> max_value;          // numeric columns
  std::vector<std::string> allowed_values;  // categorical; empty = open set
};

struct Schema {
  std::string name;
  std::vector<ColumnSpec> columns;

  const ColumnSpec* find(const std::string& column) const;
};

// The three bundled dataset shapes.
const Schema& maternal_schema();
const Schema& dengue_schema();
const Schema& pdna_schema();

struct RowError {
  std::size_t line = 0;  // physical 1-based line in the file
  std::string column;
  std::string message;
};

struct ParsedTable {
  std::vector<std::string> columns;  // schema columns present, schema order
  std::vector<std::vector<std::string>> rows;  // validated rows only
  std::vector<std::string> warnings;
  std::vector<RowError> row_errors;  // rows skipped in collect mode

  bool has_column(const std::string& name) const;
  std::size_t column_index(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
  std::vector<std::string> string_column(const std::string& name) const;
};

// Raw CSV layer. Dialect: comma separator, double-quote escaping with
// "" inside quoted fields, UTF-8, LF line endings (lone CR before LF is
// tolerated on read). Quoted fields may contain separators and newlines.
struct RawCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // physical line each row starts on
};

RawCsv read_csv_text(std::string_view text);
RawCsv read_csv_file(const std::string& path);
std::string write_csv_text(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows);
void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

/// Validating parse: the header must contain every required schema
/// column (order-insensitive; extra columns are ignored with a warning),
/// then each row is checked per column kind and range. With
/// fail_fast = true the first bad cell raises schema_violation; otherwise
/// offending rows are skipped and reported in row_errors.
ParsedTable parse_csv(const std::string& path, const Schema& schema,
                      bool fail_fast = false);
ParsedTable parse_csv_text(std::string_view text, const Schema& schema,
                           bool fail_fast = false);

/// The 64 districts of Bangladesh, sorted.
const std::vector<std::string>& bangladesh_districts();

// Synthetic generators. Pure functions of (seed, parameters).

/// Dengue triage table: age carries the dominant severity signal
/// (children and the elderly skew Severe), district and house type carry
/// secondary signal. Column shapes match dengue_schema().
std::pair<std::vector<triage::TriageRecord>, std::vector<triage::Severity>>
synth_dengue(std::uint64_t seed, std::size_t n);

/// Post-disaster needs table: 87 upazilas with fixed Sunamganj and
/// Sylhet anchor rows (Haor) and 85 seeded rows whose damage and poverty
/// are region-correlated — the bias the debiaser must reduce. Targets
/// come from vulnerability_targets on the same records.
std::pair<std::vector<equity::UpazilaRecord>, std::vector<double>>
synth_pdna(std::uint64_t seed);

/// Composite vulnerability target in [0, 1]:
/// 0.45 * minmax(damage) + 0.35 * minmax(poverty) + 0.20 * minmax(population),
/// with min/max taken over the given records.
std::vector<double> vulnerability_targets(
    const std::vector<equity::UpazilaRecord>& records);

// CSV conversions for the bundled shapes.
std::pair<std::vector<triage::TriageRecord>,
          std::optional<std::vector<triage::Severity>>>
dengue_from_table(const ParsedTable& table);
std::vector<equity::UpazilaRecord> pdna_from_table(const ParsedTable& table);

std::string dengue_to_csv(const std::vector<triage::TriageRecord>& records,
                          const std::vector<triage::Severity>& labels);
std::string pdna_to_csv(const std::vector<equity::UpazilaRecord>& records);

// Seeds of the bundled fixtures (see the provenance notes in core/data).
inline constexpr std::uint64_t kDengueFixtureSeed = 20221;
inline constexpr std::size_t kDengueFixtureSize = 4700;
inline constexpr std::uint64_t kPdnaFixtureSeed = 87;

}  // namespace trustml::data_io
