#include "fairaudit/criterion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "fairaudit/errors.hpp"

namespace fairaudit {

namespace {

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError("invalid number '" + text + "' in criterion");
  return v;
}

bool needs_quoting(const std::string& level) {
  if (level.empty()) return true;
  if (level.front() == ' ' || level.back() == ' ') return true;
  if (level.find(" AND ") != std::string::npos) return true;  // conjunction separator
  return level.find_first_of(",{}'") != std::string::npos;
}

std::string quote_level(const std::string& level) {
  if (!needs_quoting(level)) return level;
  std::string out = "'";
  for (char c : level) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += "'";
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> parse_level_list(const std::string& body) {
  std::vector<std::string> levels;
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && (body[i] == ' ' || body[i] == ',')) ++i;
    if (i >= body.size()) break;
    std::string level;
    if (body[i] == '\'') {
      ++i;
      for (;;) {
        if (i >= body.size()) throw ParseError("unterminated quoted level in criterion");
        if (body[i] == '\'') {
          if (i + 1 < body.size() && body[i + 1] == '\'') {
            level += '\'';
            i += 2;
          } else {
            ++i;
            break;
          }
        } else {
          level += body[i++];
        }
      }
    } else {
      std::size_t next = body.find(',', i);
      if (next == std::string::npos) next = body.size();
      level = trim(body.substr(i, next - i));
      i = next;
    }
    if (level.empty()) throw ParseError("empty level name in criterion");
    levels.push_back(std::move(level));
  }
  return levels;
}

struct ResolvedPredicate {
  std::size_t attr = 0;
  AttrKind kind = AttrKind::Continuous;
  Interval interval;
  std::vector<std::uint8_t> level_mask;  // categorical: indexed by level code
};

std::vector<ResolvedPredicate> resolve(const Criterion& criterion, const AuditDataset& dataset) {
  std::vector<ResolvedPredicate> out;
  out.reserve(criterion.predicates().size());
  for (const auto& pred : criterion.predicates()) {
    const auto attr = dataset.find_attribute(pred.attribute);
    if (!attr)
      throw AuditError("E_CRITERION", "unknown attribute '" + pred.attribute + "' in criterion");
    ResolvedPredicate r;
    r.attr = *attr;
    const auto& schema = dataset.attribute(*attr);
    if (std::holds_alternative<Interval>(pred.test)) {
      if (schema.kind != AttrKind::Continuous)
        throw AuditError("E_CRITERION",
                         "interval predicate on categorical attribute '" + pred.attribute + "'");
      r.kind = AttrKind::Continuous;
      r.interval = std::get<Interval>(pred.test);
    } else {
      if (schema.kind != AttrKind::Categorical)
        throw AuditError("E_CRITERION",
                         "level predicate on continuous attribute '" + pred.attribute + "'");
      r.kind = AttrKind::Categorical;
      r.level_mask.assign(schema.levels.size(), 0);
      for (const auto& level : std::get<LevelSet>(pred.test).levels) {
        const auto it = std::find(schema.levels.begin(), schema.levels.end(), level);
        if (it == schema.levels.end())
          throw AuditError("E_CRITERION", "unknown level '" + level + "' for attribute '" +
                                              pred.attribute + "'");
        r.level_mask[static_cast<std::size_t>(it - schema.levels.begin())] = 1;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

bool row_matches(const std::vector<ResolvedPredicate>& preds, const AuditDataset& dataset,
                 RowIndex row) {
  for (const auto& p : preds) {
    if (p.kind == AttrKind::Continuous) {
      const double v = dataset.continuous_value(p.attr, row);
      if (!(v > p.interval.lower && v <= p.interval.upper)) return false;
    } else {
      if (!p.level_mask[static_cast<std::size_t>(dataset.category(p.attr, row))]) return false;
    }
  }
  return true;
}

}  // namespace

bool Criterion::operator==(const Criterion& other) const {
  if (predicates_.size() != other.predicates_.size()) return false;
  for (std::size_t i = 0; i < predicates_.size(); ++i) {
    const auto& a = predicates_[i];
    const auto& b = other.predicates_[i];
    if (a.attribute != b.attribute) return false;
    if (a.test.index() != b.test.index()) return false;
    if (std::holds_alternative<Interval>(a.test)) {
      const auto& ia = std::get<Interval>(a.test);
      const auto& ib = std::get<Interval>(b.test);
      if (ia.lower != ib.lower || ia.upper != ib.upper) return false;
    } else {
      if (std::get<LevelSet>(a.test).levels != std::get<LevelSet>(b.test).levels) return false;
    }
  }
  return true;
}

std::optional<Criterion> canonicalize(const Criterion& criterion) {
  std::map<std::string, Interval> intervals;
  std::map<std::string, std::set<std::string>> level_sets;

  for (const auto& pred : criterion.predicates()) {
    if (std::holds_alternative<Interval>(pred.test)) {
      const auto& iv = std::get<Interval>(pred.test);
      if (level_sets.count(pred.attribute)) return std::nullopt;  // mixed kinds never intersect
      auto [it, fresh] = intervals.try_emplace(pred.attribute, iv);
      if (!fresh) {
        it->second.lower = std::max(it->second.lower, iv.lower);
        it->second.upper = std::min(it->second.upper, iv.upper);
      }
    } else {
      const auto& ls = std::get<LevelSet>(pred.test);
      if (ls.levels.empty()) return std::nullopt;
      if (intervals.count(pred.attribute)) return std::nullopt;
      std::set<std::string> incoming(ls.levels.begin(), ls.levels.end());
      auto [it, fresh] = level_sets.try_emplace(pred.attribute, incoming);
      if (!fresh) {
        std::set<std::string> merged;
        std::set_intersection(it->second.begin(), it->second.end(), incoming.begin(),
                              incoming.end(), std::inserter(merged, merged.begin()));
        it->second = std::move(merged);
      }
    }
  }

  std::vector<Predicate> merged;
  for (const auto& [name, iv] : intervals) {
    if (!(iv.lower < iv.upper)) return std::nullopt;
    if (std::isinf(iv.lower) && iv.lower < 0 && std::isinf(iv.upper) && iv.upper > 0)
      continue;  // unconstrained
    merged.push_back({name, iv});
  }
  for (const auto& [name, levels] : level_sets) {
    if (levels.empty()) return std::nullopt;
    LevelSet ls;
    ls.levels.assign(levels.begin(), levels.end());
    merged.push_back({name, std::move(ls)});
  }
  std::sort(merged.begin(), merged.end(),
            [](const Predicate& a, const Predicate& b) { return a.attribute < b.attribute; });
  return Criterion(std::move(merged));
}

std::vector<std::uint8_t> membership(const Criterion& criterion, const AuditDataset& dataset) {
  const auto preds = resolve(criterion, dataset);
  std::vector<std::uint8_t> mask(dataset.row_count());
  for (RowIndex row = 0; row < mask.size(); ++row)
    mask[row] = row_matches(preds, dataset, row) ? 1 : 0;
  return mask;
}

std::vector<RowIndex> matching_rows(const Criterion& criterion, const AuditDataset& dataset,
                                    std::span<const RowIndex> rows) {
  const auto preds = resolve(criterion, dataset);
  std::vector<RowIndex> out;
  for (RowIndex row : rows)
    if (row_matches(preds, dataset, row)) out.push_back(row);
  return out;
}

std::string format_criterion(const Criterion& criterion) {
  std::string out;
  bool first = true;
  auto conjunct = [&](const std::string& clause) {
    if (!first) out += " AND ";
    out += clause;
    first = false;
  };
  for (const auto& pred : criterion.predicates()) {
    if (std::holds_alternative<Interval>(pred.test)) {
      const auto& iv = std::get<Interval>(pred.test);
      if (std::isfinite(iv.lower)) conjunct(pred.attribute + " > " + format_number(iv.lower));
      if (std::isfinite(iv.upper)) conjunct(pred.attribute + " <= " + format_number(iv.upper));
    } else {
      std::string body;
      const auto& levels = std::get<LevelSet>(pred.test).levels;
      for (std::size_t i = 0; i < levels.size(); ++i) {
        if (i) body += ",";
        body += quote_level(levels[i]);
      }
      conjunct(pred.attribute + " in {" + body + "}");
    }
  }
  return out;
}

namespace {

// Splits on top-level " AND " only; separators inside quoted level names are
// part of the level.
std::vector<std::string> split_conjuncts(const std::string& text) {
  std::vector<std::string> clauses;
  bool in_quote = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\'') in_quote = !in_quote;
    if (!in_quote && text.compare(i, 5, " AND ") == 0) {
      clauses.push_back(text.substr(start, i - start));
      i += 4;
      start = i + 1;
    }
  }
  clauses.push_back(text.substr(start));
  return clauses;
}

}  // namespace

Criterion parse_criterion(const std::string& text) {
  Criterion out;
  if (trim(text).empty()) return out;

  for (const auto& raw_clause : split_conjuncts(text)) {
    const std::string clause = trim(raw_clause);
    if (clause.empty()) throw ParseError("empty conjunct in criterion '" + text + "'");

    if (const auto in_pos = clause.find(" in {"); in_pos != std::string::npos) {
      if (clause.back() != '}') throw ParseError("missing '}' in criterion '" + clause + "'");
      const std::string attr = trim(clause.substr(0, in_pos));
      const std::string body = clause.substr(in_pos + 5, clause.size() - in_pos - 6);
      LevelSet ls;
      ls.levels = parse_level_list(body);
      if (attr.empty() || ls.levels.empty())
        throw ParseError("malformed level predicate '" + clause + "'");
      out.add({attr, std::move(ls)});
    } else if (const auto le_pos = clause.find(" <= "); le_pos != std::string::npos) {
      Interval iv;
      iv.upper = parse_number(trim(clause.substr(le_pos + 4)));
      const std::string attr = trim(clause.substr(0, le_pos));
      if (attr.empty()) throw ParseError("malformed predicate '" + clause + "'");
      out.add({attr, iv});
    } else if (const auto gt_pos = clause.find(" > "); gt_pos != std::string::npos) {
      Interval iv;
      iv.lower = parse_number(trim(clause.substr(gt_pos + 3)));
      const std::string attr = trim(clause.substr(0, gt_pos));
      if (attr.empty()) throw ParseError("malformed predicate '" + clause + "'");
      out.add({attr, iv});
    } else {
      throw ParseError("unrecognized predicate '" + clause + "'");
    }
  }

  const auto canonical = canonicalize(out);
  if (!canonical) throw ParseError("unsatisfiable criterion '" + text + "'");
  return *canonical;
}

nlohmann::ordered_json criterion_to_json(const Criterion& criterion) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& pred : criterion.predicates()) {
    nlohmann::ordered_json p;
    p["attribute"] = pred.attribute;
    if (std::holds_alternative<Interval>(pred.test)) {
      const auto& iv = std::get<Interval>(pred.test);
      p["kind"] = "continuous";
      p["lower"] = std::isfinite(iv.lower) ? nlohmann::ordered_json(iv.lower)
                                           : nlohmann::ordered_json(nullptr);
      p["upper"] = std::isfinite(iv.upper) ? nlohmann::ordered_json(iv.upper)
                                           : nlohmann::ordered_json(nullptr);
    } else {
      p["kind"] = "categorical";
      p["levels"] = std::get<LevelSet>(pred.test).levels;
    }
    arr.push_back(std::move(p));
  }
  return arr;
}

Criterion criterion_from_json(const nlohmann::json& doc) {
  if (!doc.is_array()) throw ParseError("criterion JSON must be an array of predicates");
  Criterion out;
  for (const auto& p : doc) {
    const std::string attr = p.at("attribute").get<std::string>();
    const std::string kind = p.at("kind").get<std::string>();
    if (kind == "continuous") {
      Interval iv;
      if (!p.at("lower").is_null()) iv.lower = p.at("lower").get<double>();
      if (!p.at("upper").is_null()) iv.upper = p.at("upper").get<double>();
      out.add({attr, iv});
    } else if (kind == "categorical") {
      LevelSet ls;
      ls.levels = p.at("levels").get<std::vector<std::string>>();
      out.add({attr, std::move(ls)});
    } else {
      throw ParseError("unknown predicate kind '" + kind + "'");
    }
  }
  const auto canonical = canonicalize(out);
  if (!canonical) throw ParseError("unsatisfiable criterion in JSON");
  return *canonical;
}

}  // namespace fairaudit
