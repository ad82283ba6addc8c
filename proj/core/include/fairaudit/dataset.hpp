#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairaudit {

using RowIndex = std::uint32_t;

enum class AttrKind { Categorical, Continuous };

struct AttributeSchema {
  std::string name;
  AttrKind kind = AttrKind::Categorical;
  std::vector<std::string> levels;  // categorical only; first-appearance order
  bool sensitive = true;            // eligible for splitting during an audit
};

/// Immutable tabular audit input: K typed predictor columns, a binary
/// outcome, and an optional binary truth label (required for error-rate
/// metrics). Column-major storage; rows are addressed by RowIndex.
class AuditDataset {
 public:
  class Builder;

  std::size_t row_count() const { return outcome_.size(); }
  std::size_t attribute_count() const { return schema_.size(); }
  const std::vector<AttributeSchema>& schema() const { return schema_; }
  const AttributeSchema& attribute(std::size_t k) const { return schema_[k]; }
  std::optional<std::size_t> find_attribute(std::string_view name) const;

  double continuous_value(std::size_t attr, RowIndex row) const {
    return continuous_[slot_[attr]][row];
  }
  std::int32_t category(std::size_t attr, RowIndex row) const {
    return categorical_[slot_[attr]][row];
  }
  std::uint8_t outcome(RowIndex row) const { return outcome_[row]; }
  bool has_truth() const { return !truth_.empty(); }
  std::uint8_t truth(RowIndex row) const { return truth_[row]; }
  const std::string& id() const { return id_; }

  /// Indices of attributes currently flagged sensitive.
  std::vector<std::size_t> sensitive_attributes() const;

  /// Copy with the sensitive flag set exactly on `names`; an empty list
  /// keeps the flags as ingested. Unknown names are rejected.
  AuditDataset with_sensitive(const std::vector<std::string>& names) const;

 private:
  AuditDataset() = default;
  std::string id_;
  std::vector<AttributeSchema> schema_;
  std::vector<std::size_t> slot_;  // attr index -> column slot within its kind
  std::vector<std::vector<double>> continuous_;
  std::vector<std::vector<std::int32_t>> categorical_;
  std::vector<std::uint8_t> outcome_;
  std::vector<std::uint8_t> truth_;
};

class AuditDataset::Builder {
 public:
  explicit Builder(std::string dataset_id = "") { dataset_.id_ = std::move(dataset_id); }

  Builder& continuous_column(std::string name, std::vector<double> values, bool sensitive = true);
  Builder& categorical_column(std::string name, std::vector<std::string> levels,
                              std::vector<std::int32_t> codes, bool sensitive = true);
  Builder& outcome(std::vector<std::uint8_t> y);
  Builder& truth(std::vector<std::uint8_t> t);

  /// Validates shape and domain invariants and yields the dataset.
  AuditDataset build();

 private:
  AuditDataset dataset_;
};

}  // namespace fairaudit
