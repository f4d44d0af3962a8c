#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "smbp/error.hpp"
#include "smbp/io.hpp"
#include "smbp/simulate.hpp"

using namespace smbp;

namespace {

CurveFile parse(const std::string& text) {
  std::istringstream in(text);
  return parse_curves(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal file without header") {
  const auto f = parse("1,2,3\n4,5,6\n");
  CHECK(f.sample.n() == 2);
  CHECK(f.sample.grid().points() == std::vector<double>{0.0, 0.5, 1.0});
  CHECK_FALSE(f.labels.has_value());
  CHECK(f.sample.values()(1, 2) == 6.0);
}

TEST_CASE("grid header and labels") {
  const auto f = parse("# some comment\n# grid: 0, 0.2, 0.7, 1\n# label\n\n1,2,3,4,2\n5,6,7,8,1\n");
  CHECK(f.sample.grid().points() == std::vector<double>{0.0, 0.2, 0.7, 1.0});
  REQUIRE(f.labels.has_value());
  CHECK(*f.labels == std::vector<int>{2, 1});
}

TEST_CASE("parse errors carry locations") {
  const std::string ragged = error_of("1,2,3\n4,5,6\n1,2\n");
  CHECK(ragged.find("row 3 has 2 values, expected 3") != std::string::npos);
  const std::string nan = error_of("1,2,3\n4,nan,6\n");
  CHECK(nan.find("line 2, column 2") != std::string::npos);
  const std::string inf = error_of("1,2,3\n4,5,inf\n");
  CHECK(inf.find("column 3") != std::string::npos);
  const std::string junk = error_of("1,2,x3\n");
  CHECK(junk.find("cannot parse 'x3'") != std::string::npos);
  CHECK_FALSE(error_of("").empty());
  CHECK_FALSE(error_of("1,2\n# grid: 0,1\n").empty());
  CHECK_THROWS_AS(read_curves("/nonexistent/file.csv"), Error);
}

TEST_CASE("curves round trip bit-exactly") {
  HorseshoeConfig c;
  c.n1 = c.n2 = 10;
  c.m = 17;
  c.seed = 123;
  const auto data = generate(c);
  const std::string text = curves_csv(data.sample, std::span<const int>(data.labels));
  const auto back = parse(text);
  CHECK(back.sample.values() == data.sample.values());
  CHECK(back.sample.grid() == data.sample.grid());
  CHECK(*back.labels == data.labels);
  CHECK(curves_csv(back.sample, std::span<const int>(*back.labels)) == text);
}

TEST_CASE("json numbers") {
  CHECK(json_number(1.5) == nlohmann::json(1.5));
  CHECK(json_number(INFINITY) == "inf");
  CHECK(json_number(-INFINITY) == "-inf");
  CHECK(json_number(NAN) == "nan");
  CHECK(std::isinf(number_from_json(json_number(INFINITY))));
  CHECK(std::isnan(number_from_json("nan")));
  CHECK(number_from_json(0.1) == 0.1);
  CHECK_THROWS_AS(number_from_json("abc"), Error);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("classifier model round trip") {
  HorseshoeConfig c;
  c.n1 = c.n2 = 30;
  c.m = 25;
  const auto data = generate(c);
  const auto model = train(data.sample, data.labels, 3, CovarianceMode::homoscedastic);
  const auto j = to_json(model);
  CHECK(j["schema_version"] == kSchemaVersion);
  const auto back = classifier_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.d == 3);
  CHECK(back.mode == CovarianceMode::homoscedastic);
  for (std::size_t i = 0; i < data.sample.n(); ++i) {
    const auto a = predict(model, data.sample.curve(i));
    const auto b = predict(back, data.sample.curve(i));
    CHECK(a.label == b.label);
    CHECK(a.scores_per_group == b.scores_per_group);
  }
  auto broken = j;
  broken["groups"][0]["basis"] = "nope";
  CHECK_THROWS_AS(classifier_from_json(broken), Error);
  CHECK_THROWS_AS(classifier_from_json(nlohmann::json::object()), Error);
}

TEST_CASE("flat outputs") {
  GridSearchResult r;
  GridSearchRow row;
  row.delta = 0.5;
  row.r = 2;
  row.scores.k_used = 3;
  row.scores.ch = 12.5;
  r.rows.push_back(row);
  const auto csv = gridsearch_csv(r);
  CHECK(csv.rfind("delta,r,k,ch,purity,misclassification\n", 0) == 0);
  CHECK(csv.find("NA") != std::string::npos);

  std::vector<Prediction> preds(2);
  preds[0].label = 2;
  preds[0].scores_per_group = {0.1, 0.2};
  preds[1].scores_per_group = {0.0, 0.0};
  preds[1].zero_evidence = true;
  const auto p = predictions_csv(preds);
  CHECK(p == "index,label,score_1,score_2,zero_evidence\n"
             "1,2,0.10000000000000001,0.20000000000000001,0\n"
             "2,1,0,0,1\n");
}
