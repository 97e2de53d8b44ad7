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

#include "trustml/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "trustml/error.hpp"
#include "trustml/jsonout.hpp"
#include "trustml/rng.hpp"

namespace trustml::data_io {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

std::string range_text(const ColumnSpec& spec) {
  std::string lo = spec.min_value ? format_number(*spec.min_value) : "-inf";
  std::string hi = spec.max_value ? format_number(*spec.max_value) : "inf";
  return "[" + lo + ", " + hi + "]";
}

}  // namespace

const ColumnSpec* Schema::find(const std::string& column) const {
  for (const auto& spec : columns) {
    if (spec.name == column) return &spec;
  }
  return nullptr;
}

const Schema& maternal_schema() {
  static const Schema schema{
      "maternal",
      {
          {"age", ColumnKind::numeric, true, 10.0, 70.0, {}},
          {"sbp", ColumnKind::numeric, true, 60.0, 250.0, {}},
          {"bs", ColumnKind::numeric, true, 1.0, 30.0, {}},
          {"hr", ColumnKind::numeric, true, 30.0, 220.0, {}},
          {"risk_level",
           ColumnKind::categorical,
           false,
           {},
           {},
           {"low risk", "mid risk", "high risk"}},
      }};
  return schema;
}

const Schema& dengue_schema() {
  static const Schema schema{
      "dengue",
      {
          {"age", ColumnKind::numeric, true, 0.0, 120.0, {}},
          {"gender", ColumnKind::categorical, true, {}, {}, {"female", "male"}},
          {"area_type", ColumnKind::categorical, true, {}, {}, {"rural", "urban"}},
          {"house_type", ColumnKind::categorical, true, {}, {}, {}},
          {"district", ColumnKind::categorical, true, {}, {}, {}},
          {"severity", ColumnKind::categorical, false, {}, {}, {"Mild", "Severe"}},
      }};
  return schema;
}

const Schema& pdna_schema() {
  static const Schema schema{
      "pdna",
      {
          {"name", ColumnKind::text, true, {}, {}, {}},
          {"district", ColumnKind::text, true, {}, {}, {}},
          {"region_type",
           ColumnKind::categorical,
           true,
           {},
           {},
           {"Haor", "non-Haor"}},
          {"poverty_rate", ColumnKind::numeric, true, 0.0, 1.0, {}},
          {"damage_usd_m", ColumnKind::numeric, true, 0.0, {}, {}},
          {"affected_population", ColumnKind::numeric, true, 0.0, {}, {}},
      }};
  return schema;
}

bool ParsedTable::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::size_t ParsedTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  raise(ErrorCode::invalid_input, "column '" + name + "' not present");
}

std::vector<double> ParsedTable::numeric_column(const std::string& name) const {
  const std::size_t idx = column_index(name);
  std::vector<double> values;
  values.reserve(rows.size());
  for (const auto& row : rows) {
    double v = 0.0;
    parse_double(row[idx], v);  // cells were validated during parsing
    values.push_back(v);
  }
  return values;
}

std::vector<std::string> ParsedTable::string_column(const std::string& name) const {
  const std::size_t idx = column_index(name);
  std::vector<std::string> values;
  values.reserve(rows.size());
  for (const auto& row : rows) values.push_back(row[idx]);
  return values;
}

RawCsv read_csv_text(std::string_view text) {
  RawCsv csv;
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;

  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_dirty = false;  // field saw content or an explicit separator
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&]() {
    record.push_back(field);
    field.clear();
  };
  auto end_record = [&]() {
    end_field();
    const bool empty_row = record.size() == 1 && record[0].empty();
    if (!empty_row) {
      records.push_back(record);
      record_lines.push_back(record_line);
    }
    record.clear();
    field_dirty = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        field_dirty = true;
        break;
      case ',':
        end_field();
        field_dirty = true;
        break;
      case '\r':
        break;  // tolerated before LF
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field += ch;
        field_dirty = true;
    }
  }
  if (in_quotes) {
    raise(ErrorCode::schema_violation, "unterminated quoted CSV field");
  }
  if (field_dirty || !record.empty()) end_record();

  if (records.empty()) {
    raise(ErrorCode::schema_violation, "CSV has no header row");
  }
  csv.header = records.front();
  csv.rows.assign(records.begin() + 1, records.end());
  csv.row_lines.assign(record_lines.begin() + 1, record_lines.end());
  return csv;
}

RawCsv read_csv_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    raise(ErrorCode::invalid_input, "cannot open CSV file '" + path + "'");
  }
  std::ostringstream content;
  content << file.rdbuf();
  return read_csv_text(content.str());
}

std::string write_csv_text(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
  auto write_field = [](std::string& out, const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
      out += field;
      return;
    }
    out += '"';
    for (char ch : field) {
      if (ch == '"') out += '"';
      out += ch;
    }
    out += '"';
  };
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out += ',';
    write_field(out, header[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      write_field(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    raise(ErrorCode::invalid_input, "cannot open '" + path + "' for writing");
  }
  file << write_csv_text(header, rows);
  if (!file) {
    raise(ErrorCode::invalid_input, "failed writing '" + path + "'");
  }
}

ParsedTable parse_csv_text(std::string_view text, const Schema& schema,
                           bool fail_fast) {
  const RawCsv raw = read_csv_text(text);
  ParsedTable table;

  // header resolution: order-insensitive, extras ignored with a warning
  std::vector<int> source_index;
  for (const auto& spec : schema.columns) {
    const auto it = std::find(raw.header.begin(), raw.header.end(), spec.name);
    if (it == raw.header.end()) {
      if (spec.required) {
        raise(ErrorCode::schema_violation,
              "missing required column '" + spec.name + "'");
      }
      continue;
    }
    table.columns.push_back(spec.name);
    source_index.push_back(static_cast<int>(it - raw.header.begin()));
  }
  for (const auto& name : raw.header) {
    if (schema.find(name) == nullptr) {
      table.warnings.push_back("ignoring unknown column '" + name + "'");
    }
  }

  auto cell_error = [&](std::size_t line, const std::string& column,
                        const std::string& message) {
    if (fail_fast) {
      raise(ErrorCode::schema_violation,
            "line " + std::to_string(line) + ", column '" + column + "': " +
                message);
    }
    table.row_errors.push_back(RowError{line, column, message});
  };

  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    const auto& row = raw.rows[r];
    const std::size_t line = raw.row_lines[r];
    if (row.size() != raw.header.size()) {
      cell_error(line, "",
                 "expected " + std::to_string(raw.header.size()) +
                     " fields, found " + std::to_string(row.size()));
      continue;
    }
    std::vector<std::string> out_row;
    out_row.reserve(table.columns.size());
    bool ok = true;
    for (std::size_t c = 0; c < table.columns.size() && ok; ++c) {
      const ColumnSpec& spec = *schema.find(table.columns[c]);
      const std::string& cell = row[static_cast<std::size_t>(source_index[c])];
      switch (spec.kind) {
        case ColumnKind::numeric: {
          double value = 0.0;
          if (!parse_double(cell, value)) {
            cell_error(line, spec.name, "cannot parse '" + cell + "' as a number");
            ok = false;
            break;
          }
          if ((spec.min_value && value < *spec.min_value) ||
              (spec.max_value && value > *spec.max_value)) {
            cell_error(line, spec.name,
                       "value " + cell + " out of range " + range_text(spec));
            ok = false;
          }
          break;
        }
        case ColumnKind::categorical:
          if (!spec.allowed_values.empty() &&
              std::find(spec.allowed_values.begin(), spec.allowed_values.end(),
                        cell) == spec.allowed_values.end()) {
            cell_error(line, spec.name, "value '" + cell + "' not allowed");
            ok = false;
          }
          break;
        case ColumnKind::text:
          break;
      }
      if (ok) out_row.push_back(cell);
    }
    if (ok) table.rows.push_back(std::move(out_row));
  }
  return table;
}

ParsedTable parse_csv(const std::string& path, const Schema& schema,
                      bool fail_fast) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    raise(ErrorCode::invalid_input, "cannot open CSV file '" + path + "'");
  }
  std::ostringstream content;
  content << file.rdbuf();
  return parse_csv_text(content.str(), schema, fail_fast);
}

const std::vector<std::string>& bangladesh_districts() {
  static const std::vector<std::string> districts = {
      "Bagerhat",    "Bandarban",      "Barguna",      "Barishal",
      "Bhola",       "Bogura",         "Brahmanbaria", "Chandpur",
      "Chapainawabganj", "Chattogram", "Chuadanga",    "Cox's Bazar",
      "Cumilla",     "Dhaka",          "Dinajpur",     "Faridpur",
      "Feni",        "Gaibandha",      "Gazipur",      "Gopalganj",
      "Habiganj",    "Jamalpur",       "Jashore",      "Jhalakathi",
      "Jhenaidah",   "Joypurhat",      "Khagrachhari", "Khulna",
      "Kishoreganj", "Kurigram",       "Kushtia",      "Lakshmipur",
      "Lalmonirhat", "Madaripur",      "Magura",       "Manikganj",
      "Meherpur",    "Moulvibazar",    "Munshiganj",   "Mymensingh",
      "Naogaon",     "Narail",         "Narayanganj",  "Narsingdi",
      "Natore",      "Netrokona",      "Nilphamari",   "Noakhali",
      "Pabna",       "Panchagarh",     "Patuakhali",   "Pirojpur",
      "Rajbari",     "Rajshahi",       "Rangamati",    "Rangpur",
      "Satkhira",    "Shariatpur",     "Sherpur",      "Sirajganj",
      "Sunamganj",   "Sylhet",         "Tangail",      "Thakurgaon"};
  return districts;
}

std::pair<std::vector<triage::TriageRecord>, std::vector<triage::Severity>>
synth_dengue(std::uint64_t seed, std::size_t n) {
  if (n < 1) raise(ErrorCode::invalid_config, "n must be >= 1");
  SeededRng rng(mix_seed(seed, 0xDE46E));

  std::vector<std::string> other_districts;
  for (const auto& d : bangladesh_districts()) {
    if (d != "Dhaka" && d != "Chattogram") other_districts.push_back(d);
  }

  std::vector<triage::TriageRecord> records;
  std::vector<triage::Severity> labels;
  records.reserve(n);
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    triage::TriageRecord r;
    r.age = std::floor(rng.uniform() * 81.0);  // integer years 0..80
    r.gender = rng.bernoulli(0.5) ? triage::Gender::male : triage::Gender::female;
    r.area_type =
        rng.bernoulli(0.45) ? triage::AreaType::urban : triage::AreaType::rural;
    const double house_draw = rng.uniform();
    r.house_type =
        house_draw < 0.45 ? "building" : (house_draw < 0.80 ? "tinshed" : "other");
    const double district_draw = rng.uniform();
    if (district_draw < 0.15) {
      r.district = "Dhaka";
    } else if (district_draw < 0.25) {
      r.district = "Chattogram";
    } else {
      r.district = other_districts[rng.index(other_districts.size())];
    }

    // age dominates: small children and the elderly skew Severe, hotspot
    // districts and tinshed housing carry a secondary signal
    double risk = 0.12;
    if (r.age < 12.0) risk += 0.62;
    if (r.age >= 60.0) risk += 0.45;
    if (r.district == "Dhaka" || r.district == "Chattogram") risk += 0.10;
    if (r.house_type == "tinshed") risk += 0.08;
    risk = std::min(risk, 0.95);

    labels.push_back(rng.bernoulli(risk) ? triage::Severity::severe
                                         : triage::Severity::mild);
    records.push_back(std::move(r));
  }
  return {std::move(records), std::move(labels)};
}

namespace {

equity::UpazilaRecord make_upazila(std::string name, std::string district,
                                   equity::RegionType region, double poverty,
                                   double damage, double population) {
  equity::UpazilaRecord r;
  r.name = std::move(name);
  r.district = std::move(district);
  r.region_type = region;
  r.poverty_rate = poverty;
  r.damage_usd_m = damage;
  r.affected_population = population;
  return r;
}

// Rounds to a decimal string and back so generated values are exactly
// the doubles a CSV round trip reproduces.
double round_decimals(double v, int places) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  return std::strtod(buf, nullptr);
}

}  // namespace

std::pair<std::vector<equity::UpazilaRecord>, std::vector<double>>
synth_pdna(std::uint64_t seed) {
  SeededRng rng(mix_seed(seed, 0x9D4A));

  // Anchor rows: the two most vulnerable upazila entries by construction
  // (highest damage and poverty; Sylhet also the largest population).
  std::vector<equity::UpazilaRecord> records;
  records.push_back(make_upazila("Sunamganj", "Sunamganj",
                                 equity::RegionType::haor, 0.427, 159.6,
                                 400000));
  records.push_back(make_upazila("Sylhet", "Sylhet", equity::RegionType::haor,
                                 0.405, 150.2, 380000));

  static const std::vector<std::string> haor_districts = {
      "Sunamganj", "Sylhet", "Habiganj", "Moulvibazar", "Netrokona",
      "Kishoreganj"};
  static const std::vector<std::string> plain_districts = {
      "Kurigram", "Jamalpur",  "Sherpur", "Mymensingh", "Brahmanbaria",
      "Rangpur",  "Gaibandha", "Bogura",  "Tangail",    "Narsingdi",
      "Cumilla"};
  static const std::vector<std::string> name_heads = {
      "Char",  "Dewan", "Madhab", "Bishwa", "Kamal", "Shanti", "Nabi",
      "Gokul", "Hari",  "Jamal",  "Kushi",  "Lal",   "Mirza",  "Noa",
      "Pir",   "Raj",   "Sundar", "Tila",   "Ujan",  "Bania"};
  static const std::vector<std::string> name_tails = {
      "ganj", "pur", "bari", "nagar", "khali", "hat", "para", "bazar",
      "tola", "chak"};

  std::set<std::string> used = {"Sunamganj", "Sylhet"};
  auto fresh_name = [&]() {
    while (true) {
      std::string name = name_heads[rng.index(name_heads.size())] +
                         name_tails[rng.index(name_tails.size())];
      if (used.insert(name).second) return name;
    }
  };

  // Region-correlated features: Haor rows draw systematically higher
  // poverty and damage (overlapping ranges, so the correlation is real
  // but not separable), which is exactly the bias a debiased ranker has
  // to stop exploiting wholesale. The anchors dominate every feature.
  for (std::size_t i = 0; i < 28; ++i) {
    records.push_back(make_upazila(
        fresh_name(), haor_districts[rng.index(haor_districts.size())],
        equity::RegionType::haor, round_decimals(rng.uniform(0.15, 0.38), 3),
        round_decimals(rng.uniform(20.0, 130.0), 1),
        std::floor(rng.uniform(50000.0, 350000.0))));
  }
  for (std::size_t i = 0; i < 57; ++i) {
    records.push_back(make_upazila(
        fresh_name(), plain_districts[rng.index(plain_districts.size())],
        equity::RegionType::non_haor, round_decimals(rng.uniform(0.08, 0.35), 3),
        round_decimals(rng.uniform(5.0, 100.0), 1),
        std::floor(rng.uniform(30000.0, 300000.0))));
  }

  std::vector<double> targets = vulnerability_targets(records);
  return {std::move(records), std::move(targets)};
}

std::vector<double> vulnerability_targets(
    const std::vector<equity::UpazilaRecord>& records) {
  if (records.empty()) raise(ErrorCode::invalid_input, "no records");
  const auto feature = [](const equity::UpazilaRecord& r, int k) {
    return k == 0 ? r.damage_usd_m
                  : (k == 1 ? r.poverty_rate : r.affected_population);
  };
  static constexpr double kWeights[3] = {0.45, 0.35, 0.20};

  double lo[3], hi[3];
  for (int k = 0; k < 3; ++k) {
    lo[k] = hi[k] = feature(records[0], k);
    for (const auto& r : records) {
      lo[k] = std::min(lo[k], feature(r, k));
      hi[k] = std::max(hi[k], feature(r, k));
    }
  }
  std::vector<double> targets;
  targets.reserve(records.size());
  for (const auto& r : records) {
    double t = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double nx = hi[k] > lo[k]
                            ? (feature(r, k) - lo[k]) / (hi[k] - lo[k])
                            : 0.5;
      t += kWeights[k] * nx;
    }
    targets.push_back(t);
  }
  return targets;
}

std::pair<std::vector<triage::TriageRecord>,
          std::optional<std::vector<triage::Severity>>>
dengue_from_table(const ParsedTable& table) {
  const auto age = table.numeric_column("age");
  const auto gender = table.string_column("gender");
  const auto area = table.string_column("area_type");
  const auto house = table.string_column("house_type");
  const auto district = table.string_column("district");

  std::vector<triage::TriageRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    triage::TriageRecord r;
    r.age = age[i];
    r.gender = triage::gender_from_string(gender[i]);
    r.area_type = triage::area_type_from_string(area[i]);
    r.house_type = house[i];
    r.district = district[i];
    records.push_back(std::move(r));
  }

  std::optional<std::vector<triage::Severity>> labels;
  if (table.has_column("severity")) {
    labels.emplace();
    for (const auto& s : table.string_column("severity")) {
      labels->push_back(s == "Severe" ? triage::Severity::severe
                                      : triage::Severity::mild);
    }
  }
  return {std::move(records), std::move(labels)};
}

std::vector<equity::UpazilaRecord> pdna_from_table(const ParsedTable& table) {
  const auto name = table.string_column("name");
  const auto district = table.string_column("district");
  const auto region = table.string_column("region_type");
  const auto poverty = table.numeric_column("poverty_rate");
  const auto damage = table.numeric_column("damage_usd_m");
  const auto population = table.numeric_column("affected_population");

  std::vector<equity::UpazilaRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    records.push_back(make_upazila(name[i], district[i],
                                   equity::region_from_string(region[i]),
                                   poverty[i], damage[i], population[i]));
  }
  return records;
}

std::string dengue_to_csv(const std::vector<triage::TriageRecord>& records,
                          const std::vector<triage::Severity>& labels) {
  if (records.size() != labels.size()) {
    raise(ErrorCode::invalid_input, "records and labels misaligned");
  }
  std::vector<std::vector<std::string>> rows;
  rows.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    rows.push_back({format_number(r.age), triage::to_string(r.gender),
                    triage::to_string(r.area_type), r.house_type, r.district,
                    triage::to_string(labels[i])});
  }
  return write_csv_text(
      {"age", "gender", "area_type", "house_type", "district", "severity"},
      rows);
}

std::string pdna_to_csv(const std::vector<equity::UpazilaRecord>& records) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    rows.push_back({r.name, r.district, equity::to_string(r.region_type),
                    format_number(r.poverty_rate),
                    format_number(r.damage_usd_m),
                    format_number(r.affected_population)});
  }
  return write_csv_text({"name", "district", "region_type", "poverty_rate",
                         "damage_usd_m", "affected_population"},
                        rows);
}

}  // namespace trustml::data_io
