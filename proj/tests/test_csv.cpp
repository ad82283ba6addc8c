#include <doctest.h>

#include <sstream>

#include "fairaudit/csv.hpp"
#include "fairaudit/errors.hpp"

using namespace fairaudit;

namespace {

SchemaDecl basic_schema() {
  SchemaDecl decl;
  decl.columns["age"] = {ColumnRole::Continuous};
  decl.columns["gender"] = {ColumnRole::Categorical};
  decl.columns["y"] = {ColumnRole::Outcome};
  return decl;
}

AuditDataset ingest_text(const std::string& text, const SchemaDecl& decl) {
  std::istringstream in(text);
  return ingest(read_csv(in), decl, "test");
}

}  // namespace

TEST_CASE("well-formed CSV ingests with expected shape") {
  const auto data = ingest_text(
      "age,gender,y\n"
      "34,f,1\n"
      "51,m,0\n"
      "29,f,0\n"
      "62,m,1\n",
      basic_schema());
  CHECK(data.row_count() == 4);
  CHECK(data.attribute_count() == 2);
  CHECK(data.attribute(0).name == "age");
  CHECK(data.attribute(1).levels == std::vector<std::string>{"f", "m"});  // first appearance
  CHECK(data.outcome(0) == 1);
}

TEST_CASE("domain violations are reported with row and column") {
  try {
    ingest_text(
        "age,gender,y\n"
        "34,f,1\n"
        "51,m,0\n"
        "29,f,2\n"
        "62,m,1\n",
        basic_schema());
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(e.row() == 3);
    CHECK(e.column() == "y");
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    CHECK(std::string(e.what()).find("y") != std::string::npos);
  }
}

TEST_CASE("missing values and unparsable numbers are rejected with location") {
  CHECK_THROWS_AS(ingest_text("age,gender,y\n34,f,1\n,m,0\n", basic_schema()), IngestError);
  try {
    ingest_text("age,gender,y\n34,f,1\nold,m,0\n", basic_schema());
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(e.row() == 2);
    CHECK(e.column() == "age");
  }
}

TEST_CASE("duplicate header names are rejected") {
  CHECK_THROWS_AS(ingest_text("age,age,y\n1,2,0\n", basic_schema()), IngestError);
}

TEST_CASE("prediction-error encoding from predicted/actual columns") {
  SchemaDecl decl;
  decl.columns["race"] = {ColumnRole::Categorical};
  decl.columns["score"] = {ColumnRole::Predicted, true, {"High", "Medium"}};
  decl.columns["recid"] = {ColumnRole::Actual, true, {"1"}};
  const auto data = ingest_text(
      "race,score,recid\n"
      "a,High,1\n"   // predicted 1, actual 1 -> correct, y=0, truth=1
      "a,Low,1\n"    // predicted 0, actual 1 -> error,   y=1, truth=1
      "b,Medium,0\n" // predicted 1, actual 0 -> error,   y=1, truth=0
      "b,Low,0\n",   // predicted 0, actual 0 -> correct, y=0, truth=0
      decl);
  REQUIRE(data.has_truth());
  CHECK(data.outcome(0) == 0);
  CHECK(data.outcome(1) == 1);
  CHECK(data.outcome(2) == 1);
  CHECK(data.outcome(3) == 0);
  CHECK(data.truth(0) == 1);
  CHECK(data.truth(3) == 0);
}

TEST_CASE("quoted fields with embedded separators and quotes") {
  SchemaDecl decl;
  decl.columns["name"] = {ColumnRole::Categorical};
  decl.columns["y"] = {ColumnRole::Outcome};
  const auto data = ingest_text(
      "name,y\n"
      "\"last, first\",1\n"
      "\"say \"\"hi\"\"\",0\n"
      "plain,1\n",
      decl);
  CHECK(data.attribute(0).levels ==
        std::vector<std::string>{"last, first", "say \"hi\"", "plain"});
}

TEST_CASE("fields are trimmed of padding spaces") {
  const auto data = ingest_text("age,gender,y\n 34 , f ,1\n51,m,0\n", basic_schema());
  CHECK(data.attribute(1).levels[0] == "f");
  CHECK(data.continuous_value(0, 0) == 34.0);
}

TEST_CASE("ingest -> write_csv -> ingest round-trips exactly") {
  const auto original = ingest_text(
      "age,gender,y\n"
      "34.25,f,1\n"
      "51,m,0\n"
      "29.5,with space,0\n"
      "62,\"a,b\",1\n",
      basic_schema());
  std::ostringstream out;
  write_csv(original, out);
  std::istringstream back(out.str());
  const auto reparsed = ingest(read_csv(back), sidecar_schema(original), "test");

  REQUIRE(reparsed.row_count() == original.row_count());
  REQUIRE(reparsed.attribute_count() == original.attribute_count());
  for (RowIndex i = 0; i < original.row_count(); ++i) {
    CHECK(reparsed.continuous_value(0, i) == original.continuous_value(0, i));
    CHECK(reparsed.category(1, i) == original.category(1, i));
    CHECK(reparsed.outcome(i) == original.outcome(i));
  }
  std::ostringstream out2;
  write_csv(reparsed, out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("schema JSON round-trips") {
  const auto decl = schema_from_json(nlohmann::json::parse(R"({
    "columns": [
      {"name": "age", "role": "continuous"},
      {"name": "race", "role": "categorical", "sensitive": false},
      {"name": "score", "role": "predicted", "positive": ["High", "Medium"]},
      {"name": "recid", "role": "actual", "positive": "1"},
      {"name": "junk", "role": "ignored"}
    ]})"));
  CHECK(decl.columns.at("age").role == ColumnRole::Continuous);
  CHECK_FALSE(decl.columns.at("race").sensitive);
  CHECK(decl.columns.at("score").positive == std::vector<std::string>{"High", "Medium"});
  const auto round = schema_from_json(nlohmann::json::parse(schema_to_json(decl).dump()));
  CHECK(round.columns.size() == decl.columns.size());
  CHECK(round.columns.at("recid").positive == std::vector<std::string>{"1"});

  CHECK_THROWS_AS(schema_from_json(nlohmann::json::parse(
                      R"({"columns":[{"name":"a","role":"mystery"}]})")),
                  ConfigError);
}

TEST_CASE("schema validation errors") {
  SchemaDecl no_outcome;
  no_outcome.columns["age"] = {ColumnRole::Continuous};
  CHECK_THROWS_AS(ingest_text("age,y\n1,0\n", no_outcome), ConfigError);

  SchemaDecl half_pair = basic_schema();
  half_pair.columns["score"] = {ColumnRole::Predicted};
  CHECK_THROWS_AS(ingest_text("age,gender,score,y\n1,f,1,0\n", half_pair), ConfigError);

  SchemaDecl missing_col = basic_schema();
  missing_col.columns["absent"] = {ColumnRole::Continuous};
  CHECK_THROWS_AS(ingest_text("age,gender,y\n1,f,0\n", missing_col), IngestError);
}
