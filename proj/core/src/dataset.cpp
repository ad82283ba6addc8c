#include "fairaudit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "fairaudit/errors.hpp"

namespace fairaudit {

std::optional<std::size_t> AuditDataset::find_attribute(std::string_view name) const {
  for (std::size_t k = 0; k < schema_.size(); ++k)
    if (schema_[k].name == name) return k;
  return std::nullopt;
}

std::vector<std::size_t> AuditDataset::sensitive_attributes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < schema_.size(); ++k)
    if (schema_[k].sensitive) out.push_back(k);
  return out;
}

AuditDataset AuditDataset::with_sensitive(const std::vector<std::string>& names) const {
  AuditDataset copy = *this;
  if (names.empty()) return copy;  // keep the ingested flags
  for (auto& attr : copy.schema_) attr.sensitive = false;
  for (const auto& name : names) {
    const auto k = copy.find_attribute(name);
    if (!k) throw ConfigError("unknown sensitive attribute '" + name + "'");
    copy.schema_[*k].sensitive = true;
  }
  return copy;
}

AuditDataset::Builder& AuditDataset::Builder::continuous_column(std::string name,
                                                                std::vector<double> values,
                                                                bool sensitive) {
  AttributeSchema attr;
  attr.name = std::move(name);
  attr.kind = AttrKind::Continuous;
  attr.sensitive = sensitive;
  dataset_.slot_.push_back(dataset_.continuous_.size());
  dataset_.continuous_.push_back(std::move(values));
  dataset_.schema_.push_back(std::move(attr));
  return *this;
}

AuditDataset::Builder& AuditDataset::Builder::categorical_column(std::string name,
                                                                 std::vector<std::string> levels,
                                                                 std::vector<std::int32_t> codes,
                                                                 bool sensitive) {
  AttributeSchema attr;
  attr.name = std::move(name);
  attr.kind = AttrKind::Categorical;
  attr.levels = std::move(levels);
  attr.sensitive = sensitive;
  dataset_.slot_.push_back(dataset_.categorical_.size());
  dataset_.categorical_.push_back(std::move(codes));
  dataset_.schema_.push_back(std::move(attr));
  return *this;
}

AuditDataset::Builder& AuditDataset::Builder::outcome(std::vector<std::uint8_t> y) {
  dataset_.outcome_ = std::move(y);
  return *this;
}

AuditDataset::Builder& AuditDataset::Builder::truth(std::vector<std::uint8_t> t) {
  dataset_.truth_ = std::move(t);
  return *this;
}

AuditDataset AuditDataset::Builder::build() {
  auto& d = dataset_;
  const std::size_t n = d.outcome_.size();
  if (d.schema_.empty()) throw ConfigError("dataset has no predictor columns");

  std::unordered_set<std::string> names;
  for (std::size_t k = 0; k < d.schema_.size(); ++k) {
    const auto& attr = d.schema_[k];
    if (!names.insert(attr.name).second)
      throw ConfigError("duplicate attribute name '" + attr.name + "'");
    if (attr.kind == AttrKind::Categorical) {
      if (attr.levels.empty())
        throw ConfigError("categorical attribute '" + attr.name + "' has no levels");
      std::unordered_set<std::string> seen;
      for (const auto& level : attr.levels)
        if (!seen.insert(level).second)
          throw ConfigError("duplicate level '" + level + "' in attribute '" + attr.name + "'");
      const auto& codes = d.categorical_[d.slot_[k]];
      if (codes.size() != n)
        throw ConfigError("column '" + attr.name + "' length does not match outcome length");
      for (std::int32_t code : codes)
        if (code < 0 || static_cast<std::size_t>(code) >= attr.levels.size())
          throw ConfigError("level code out of range in attribute '" + attr.name + "'");
    } else {
      const auto& values = d.continuous_[d.slot_[k]];
      if (values.size() != n)
        throw ConfigError("column '" + attr.name + "' length does not match outcome length");
      for (double v : values)
        if (!std::isfinite(v))
          throw ConfigError("non-finite value in continuous attribute '" + attr.name + "'");
    }
  }
  for (std::uint8_t y : d.outcome_)
    if (y > 1) throw ConfigError("outcome values must be 0 or 1");
  if (!d.truth_.empty()) {
    if (d.truth_.size() != n) throw ConfigError("truth column length does not match outcome");
    for (std::uint8_t t : d.truth_)
      if (t > 1) throw ConfigError("truth values must be 0 or 1");
  }
  return std::move(dataset_);
}

}  // namespace fairaudit
