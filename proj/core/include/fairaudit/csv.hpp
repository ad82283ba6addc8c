#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairaudit/dataset.hpp"

namespace fairaudit {

/// Raw RFC-4180 table: header plus string rows. Fields are trimmed of
/// surrounding spaces/tabs after unquoting (audit CSVs in the wild pad with
/// spaces; an empty field is still a missing value).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

enum class ColumnRole {
  Categorical,
  Continuous,
  Outcome,    // binary audited outcome
  Truth,      // binary ground-truth label
  Predicted,  // paired with Actual: derives outcome = (predicted != actual), truth = actual
  Actual,
  Ignored,
};

struct ColumnSpec {
  ColumnRole role = ColumnRole::Ignored;
  bool sensitive = true;
  /// For outcome/truth/predicted/actual columns holding non-numeric values:
  /// field values in this list map to 1, everything else to 0. When empty the
  /// column must contain literal 0/1.
  std::vector<std::string> positive;
};

/// Maps CSV columns to roles. Columns absent from the map are ignored.
struct SchemaDecl {
  std::map<std::string, ColumnSpec> columns;
};

SchemaDecl schema_from_json(const nlohmann::json& doc);
SchemaDecl schema_from_json_file(const std::string& path);
nlohmann::ordered_json schema_to_json(const SchemaDecl& decl);

/// Validated ingestion: typed columns, no missing values, binary outcome.
/// Errors carry the 1-based data row and column name.
AuditDataset ingest(const CsvTable& table, const SchemaDecl& decl, std::string dataset_id);
AuditDataset ingest_file(const std::string& csv_path, const SchemaDecl& decl,
                         std::string dataset_id = "");

/// Writes a dataset back to RFC-4180 CSV (predictors in schema order, then
/// y and, when present, truth). ingest(write(d)) reproduces d exactly.
void write_csv(const AuditDataset& dataset, std::ostream& out);
void write_csv_file(const AuditDataset& dataset, const std::string& path);

/// Schema declaration matching write_csv output for the given dataset.
SchemaDecl sidecar_schema(const AuditDataset& dataset);

}  // namespace fairaudit
