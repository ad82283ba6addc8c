#pragma once

#include <stdexcept>
#include <string>

namespace fairaudit {

/// Base error for everything the engine can reject; `code()` is a stable,
/// machine-parsable identifier (E_CONFIG, E_INGEST, ...).
class AuditError : public std::runtime_error {
 public:
  AuditError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class ConfigError : public AuditError {
 public:
  explicit ConfigError(const std::string& message) : AuditError("E_CONFIG", message) {}
};

/// Ingestion failure with the offending location. Rows are 1-based data rows
/// (the header is row 0); column is the header name when known.
class IngestError : public AuditError {
 public:
  IngestError(const std::string& message, std::size_t row, std::string column)
      : AuditError("E_INGEST", locate(message, row, column)),
        row_(row),
        column_(std::move(column)) {}
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  static std::string locate(const std::string& message, std::size_t row, const std::string& col) {
    std::string out = message;
    if (row > 0) out += " (row " + std::to_string(row);
    if (row > 0 && !col.empty()) out += ", column " + col;
    if (row > 0) out += ")";
    if (row == 0 && !col.empty()) out += " (column " + col + ")";
    return out;
  }
  std::size_t row_;
  std::string column_;
};

class ParseError : public AuditError {
 public:
  explicit ParseError(const std::string& message) : AuditError("E_PARSE", message) {}
};

}  // namespace fairaudit
