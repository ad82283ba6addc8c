#include "fairaudit/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "fairaudit/errors.hpp"

namespace fairaudit {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string role_name(ColumnRole role) {
  switch (role) {
    case ColumnRole::Categorical: return "categorical";
    case ColumnRole::Continuous: return "continuous";
    case ColumnRole::Outcome: return "outcome";
    case ColumnRole::Truth: return "truth";
    case ColumnRole::Predicted: return "predicted";
    case ColumnRole::Actual: return "actual";
    case ColumnRole::Ignored: return "ignored";
  }
  return "ignored";
}

ColumnRole role_from_name(const std::string& name) {
  if (name == "categorical") return ColumnRole::Categorical;
  if (name == "continuous") return ColumnRole::Continuous;
  if (name == "outcome") return ColumnRole::Outcome;
  if (name == "truth") return ColumnRole::Truth;
  if (name == "predicted") return ColumnRole::Predicted;
  if (name == "actual") return ColumnRole::Actual;
  if (name == "ignored") return ColumnRole::Ignored;
  throw ConfigError("unknown column role '" + name + "'");
}

bool needs_csv_quoting(const std::string& field) {
  return field.find_first_of(",\"\r\n") != std::string::npos || field != trim(field);
}

void write_field(std::ostream& out, const std::string& field) {
  if (!needs_csv_quoting(field)) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

/// Binary value reader shared by outcome/truth/predicted/actual columns.
std::uint8_t parse_binary(const std::string& field, const ColumnSpec& spec,
                          const std::string& column, std::size_t row) {
  if (!spec.positive.empty()) {
    return std::find(spec.positive.begin(), spec.positive.end(), field) != spec.positive.end()
               ? 1
               : 0;
  }
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw IngestError(role_name(spec.role) + " value '" + field + "' not in {0,1}", row, column);
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool any_char = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(field_was_quoted ? field : trim(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    if (table.header.empty()) {
      table.header = std::move(record);
    } else {
      if (record.size() != table.header.size())
        throw IngestError("expected " + std::to_string(table.header.size()) + " fields, found " +
                              std::to_string(record.size()),
                          table.rows.size() + 1, "");
      table.rows.push_back(std::move(record));
    }
    record = {};
    any_char = false;
  };

  char c;
  while (in.get(c)) {
    any_char = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
        if (c == '\n') ++line;
      }
    } else if (c == '"') {
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      ++line;
      end_record();
    } else if (c == '\n') {
      ++line;
      end_record();
    } else {
      field += c;
    }
  }
  if (in_quotes)
    throw IngestError("unterminated quoted field (starting near line " + std::to_string(line) + ")",
                      table.rows.size() + 1, "");
  if (any_char || !field.empty() || !record.empty()) end_record();
  if (table.header.empty()) throw IngestError("CSV input has no header row", 0, "");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AuditError("E_IO", "cannot open CSV file '" + path + "'");
  return read_csv(in);
}

SchemaDecl schema_from_json(const nlohmann::json& doc) {
  SchemaDecl decl;
  if (!doc.is_object() || !doc.contains("columns") || !doc.at("columns").is_array())
    throw ConfigError("schema JSON must be an object with a 'columns' array");
  for (const auto& col : doc.at("columns")) {
    const std::string name = col.at("name").get<std::string>();
    ColumnSpec spec;
    spec.role = role_from_name(col.at("role").get<std::string>());
    if (col.contains("sensitive")) spec.sensitive = col.at("sensitive").get<bool>();
    if (col.contains("positive")) {
      const auto& pos = col.at("positive");
      if (pos.is_string())
        spec.positive.push_back(pos.get<std::string>());
      else
        spec.positive = pos.get<std::vector<std::string>>();
    }
    if (!decl.columns.emplace(name, std::move(spec)).second)
      throw ConfigError("column '" + name + "' declared twice in schema");
  }
  return decl;
}

SchemaDecl schema_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AuditError("E_IO", "cannot open schema file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid schema JSON in '" + path + "': " + e.what());
  }
  return schema_from_json(doc);
}

nlohmann::ordered_json schema_to_json(const SchemaDecl& decl) {
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (const auto& [name, spec] : decl.columns) {
    nlohmann::ordered_json col;
    col["name"] = name;
    col["role"] = role_name(spec.role);
    if ((spec.role == ColumnRole::Categorical || spec.role == ColumnRole::Continuous) &&
        !spec.sensitive)
      col["sensitive"] = false;
    if (!spec.positive.empty()) col["positive"] = spec.positive;
    cols.push_back(std::move(col));
  }
  nlohmann::ordered_json doc;
  doc["columns"] = std::move(cols);
  return doc;
}

AuditDataset ingest(const CsvTable& table, const SchemaDecl& decl, std::string dataset_id) {
  std::unordered_set<std::string> seen;
  for (const auto& name : table.header)
    if (!seen.insert(name).second) throw IngestError("duplicate column name '" + name + "'", 0, name);

  struct BoundColumn {
    std::string name;
    std::size_t index;
    const ColumnSpec* spec;
  };
  std::vector<BoundColumn> predictors;
  std::optional<BoundColumn> outcome_col, truth_col, predicted_col, actual_col;

  for (const auto& [name, spec] : decl.columns) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) {
      if (spec.role == ColumnRole::Ignored) continue;
      throw IngestError("schema column '" + name + "' not present in CSV", 0, name);
    }
    BoundColumn bound{name, static_cast<std::size_t>(it - table.header.begin()), &spec};
    switch (spec.role) {
      case ColumnRole::Categorical:
      case ColumnRole::Continuous: predictors.push_back(bound); break;
      case ColumnRole::Outcome: outcome_col = bound; break;
      case ColumnRole::Truth: truth_col = bound; break;
      case ColumnRole::Predicted: predicted_col = bound; break;
      case ColumnRole::Actual: actual_col = bound; break;
      case ColumnRole::Ignored: break;
    }
  }

  if (predictors.empty()) throw ConfigError("schema declares no predictor columns");
  if (predicted_col.has_value() != actual_col.has_value())
    throw ConfigError("'predicted' and 'actual' roles must be declared together");
  if (outcome_col && predicted_col)
    throw ConfigError("declare either an outcome column or a predicted/actual pair, not both");
  if (!outcome_col && !predicted_col) throw ConfigError("schema declares no outcome column");
  if (truth_col && predicted_col)
    throw ConfigError("'truth' is derived from 'actual'; do not declare both");

  // Keep predictors in CSV column order for reproducible attribute indexing.
  std::sort(predictors.begin(), predictors.end(),
            [](const BoundColumn& a, const BoundColumn& b) { return a.index < b.index; });

  const std::size_t n = table.rows.size();
  AuditDataset::Builder builder(std::move(dataset_id));

  for (const auto& col : predictors) {
    if (col.spec->role == ColumnRole::Continuous) {
      std::vector<double> values(n);
      for (std::size_t r = 0; r < n; ++r) {
        const std::string& field = table.rows[r][col.index];
        if (field.empty()) throw IngestError("missing value", r + 1, col.name);
        double v = 0.0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(v))
          throw IngestError("cannot parse '" + field + "' as a finite number", r + 1, col.name);
        values[r] = v;
      }
      builder.continuous_column(col.name, std::move(values), col.spec->sensitive);
    } else {
      std::vector<std::string> levels;
      std::unordered_map<std::string, std::int32_t> level_index;
      std::vector<std::int32_t> codes(n);
      for (std::size_t r = 0; r < n; ++r) {
        const std::string& field = table.rows[r][col.index];
        if (field.empty()) throw IngestError("missing value", r + 1, col.name);
        auto [it, fresh] = level_index.emplace(field, static_cast<std::int32_t>(levels.size()));
        if (fresh) levels.push_back(field);
        codes[r] = it->second;
      }
      builder.categorical_column(col.name, std::move(levels), std::move(codes),
                                 col.spec->sensitive);
    }
  }

  auto read_binary = [&](const BoundColumn& col) {
    std::vector<std::uint8_t> values(n);
    for (std::size_t r = 0; r < n; ++r) {
      const std::string& field = table.rows[r][col.index];
      if (field.empty()) throw IngestError("missing value", r + 1, col.name);
      values[r] = parse_binary(field, *col.spec, col.name, r + 1);
    }
    return values;
  };

  if (outcome_col) {
    builder.outcome(read_binary(*outcome_col));
    if (truth_col) builder.truth(read_binary(*truth_col));
  } else {
    // Prediction-error encoding: y = 1 iff the model got the row wrong.
    const auto predicted = read_binary(*predicted_col);
    const auto actual = read_binary(*actual_col);
    std::vector<std::uint8_t> y(n);
    for (std::size_t r = 0; r < n; ++r) y[r] = predicted[r] != actual[r] ? 1 : 0;
    builder.outcome(std::move(y));
    builder.truth(actual);
  }

  return builder.build();
}

AuditDataset ingest_file(const std::string& csv_path, const SchemaDecl& decl,
                         std::string dataset_id) {
  if (dataset_id.empty()) {
    const auto slash = csv_path.find_last_of("/\\");
    dataset_id = slash == std::string::npos ? csv_path : csv_path.substr(slash + 1);
  }
  return ingest(read_csv_file(csv_path), decl, std::move(dataset_id));
}

void write_csv(const AuditDataset& dataset, std::ostream& out) {
  const auto& schema = dataset.schema();
  for (const auto& attr : schema)
    if (attr.name == "y" || attr.name == "truth")
      throw ConfigError("attribute name '" + attr.name + "' collides with a reserved CSV column");
  for (const auto& attr : schema) {
    write_field(out, attr.name);
    out << ',';
  }
  out << 'y';
  if (dataset.has_truth()) out << ",truth";
  out << '\n';

  char buf[32];
  for (RowIndex row = 0; row < dataset.row_count(); ++row) {
    for (std::size_t k = 0; k < schema.size(); ++k) {
      if (schema[k].kind == AttrKind::Continuous) {
        const auto res =
            std::to_chars(buf, buf + sizeof(buf), dataset.continuous_value(k, row));
        out.write(buf, res.ptr - buf);
      } else {
        write_field(out, schema[k].levels[static_cast<std::size_t>(dataset.category(k, row))]);
      }
      out << ',';
    }
    out << static_cast<int>(dataset.outcome(row));
    if (dataset.has_truth()) out << ',' << static_cast<int>(dataset.truth(row));
    out << '\n';
  }
}

void write_csv_file(const AuditDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AuditError("E_IO", "cannot write CSV file '" + path + "'");
  write_csv(dataset, out);
}

SchemaDecl sidecar_schema(const AuditDataset& dataset) {
  SchemaDecl decl;
  for (const auto& attr : dataset.schema()) {
    ColumnSpec spec;
    spec.role =
        attr.kind == AttrKind::Continuous ? ColumnRole::Continuous : ColumnRole::Categorical;
    spec.sensitive = attr.sensitive;
    decl.columns.emplace(attr.name, spec);
  }
  ColumnSpec y;
  y.role = ColumnRole::Outcome;
  decl.columns.emplace("y", y);
  if (dataset.has_truth()) {
    ColumnSpec t;
    t.role = ColumnRole::Truth;
    decl.columns.emplace("truth", t);
  }
  return decl;
}

}  // namespace fairaudit
