#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fairaudit/dataset.hpp"

namespace fairaudit {

/// Categorical membership test: attribute value in a non-empty level set.
struct LevelSet {
  std::vector<std::string> levels;  // sorted, unique
};

/// Continuous membership test on the half-open interval (lower, upper].
struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

struct Predicate {
  std::string attribute;
  std::variant<LevelSet, Interval> test;
};

/// Conjunction of predicates defining a subgroup. Canonical form has at most
/// one predicate per attribute, sorted by attribute name; the empty criterion
/// matches every row.
class Criterion {
 public:
  Criterion() = default;
  explicit Criterion(std::vector<Predicate> predicates) : predicates_(std::move(predicates)) {}

  const std::vector<Predicate>& predicates() const { return predicates_; }
  bool empty() const { return predicates_.empty(); }
  void add(Predicate p) { predicates_.push_back(std::move(p)); }

  bool operator==(const Criterion& other) const;

 private:
  std::vector<Predicate> predicates_;
};

/// Merges predicates per attribute (interval/level-set intersection) and
/// sorts by attribute name. Returns nullopt when the conjunction is
/// unsatisfiable (empty intersection).
std::optional<Criterion> canonicalize(const Criterion& criterion);

/// Row mask: mask[i] = 1 iff row i satisfies every predicate. Throws
/// AuditError for unknown attributes, kind mismatches, or unknown levels.
std::vector<std::uint8_t> membership(const Criterion& criterion, const AuditDataset& dataset);

/// Per-row evaluation over an explicit row subset; returns matching rows.
std::vector<RowIndex> matching_rows(const Criterion& criterion, const AuditDataset& dataset,
                                    std::span<const RowIndex> rows);

/// Human-readable form, e.g. `age > 42 AND age <= 66 AND race in {r1,r3}`.
/// The empty criterion formats as the empty string; both round-trip.
std::string format_criterion(const Criterion& criterion);
Criterion parse_criterion(const std::string& text);

nlohmann::ordered_json criterion_to_json(const Criterion& criterion);
Criterion criterion_from_json(const nlohmann::json& doc);

}  // namespace fairaudit
