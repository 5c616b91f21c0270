/*
 * Copyright 2026 The Exposition Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "exposition/explainer.h"

#include <atomic>
#include <cmath>

#include "exposition/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace exposition {
namespace {

using testing::explain_fn;
using testing::numeric_data;

class CountingPredictor : public Predictor {
 public:
  std::vector<double> predict(const Rows& rows) const override {
    std::vector<double> out(rows.n_rows());
    for (auto& v : out) v = static_cast<double>(calls_++);
    return out;
  }

 private:
  mutable std::atomic<int> calls_{0};
};

class ShortPredictor : public Predictor {
 public:
  std::vector<double> predict(const Rows& rows) const override {
    return std::vector<double>(rows.n_rows() > 0 ? rows.n_rows() - 1 : 0);
  }
};

TEST(Explainer, InfersClassificationFromBinaryTarget) {
  auto data = numeric_data({"x"}, {{0, 1, 2}}, {0, 1, 1});
  auto e = explain_fn(data, [](auto) { return 0.5; }, "m", std::nullopt);
  EXPECT_EQ(e->task(), TaskType::kClassification);
  auto r = explain_fn(numeric_data({"x"}, {{0, 1}}, {0, 2}),
                      [](auto) { return 0.0; }, "m", std::nullopt);
  EXPECT_EQ(r->task(), TaskType::kRegression);
}

TEST(Explainer, AcceptsDeterministicPredictor) {
  auto data = numeric_data({"x"}, {{0, 1}}, {1, 3});
  auto e = explain_fn(data, [](auto row) { return 2 * row[0] + 1; });
  EXPECT_EQ(predict_batch(*e, e->features()), (std::vector<double>{1, 3}));
}

TEST(Explainer, RejectsNonDeterministicPredictor) {
  auto data = numeric_data({"x"}, {{0, 1}}, {1, 3});
  EXPECT_THROW(Explainer(std::make_shared<CountingPredictor>(), data, "m"),
               NonDeterministicPredictorError);
}

TEST(Explainer, RejectsShortOutput) {
  auto data = numeric_data({"x"}, {{0, 1}}, {1, 3});
  EXPECT_THROW(Explainer(std::make_shared<ShortPredictor>(), data, "m"),
               PredictorContractError);
}

TEST(Explainer, RejectsScoresOutsideUnitIntervalForClassification) {
  auto data = numeric_data({"x"}, {{0, 1}}, {0, 1});
  EXPECT_THROW(explain_fn(data, [](auto) { return 1.5; }, "m",
                          TaskType::kClassification),
               RangeError);
}

TEST(Explainer, ClassificationNeedsBinaryTarget) {
  auto data = numeric_data({"x"}, {{0, 1}}, {0, 2});
  EXPECT_THROW(explain_fn(data, [](auto) { return 0.5; }, "m",
                          TaskType::kClassification),
               ParameterError);
}

TEST(Explainer, RejectsEmptyLabel) {
  auto data = numeric_data({"x"}, {{0, 1}}, {0, 2});
  EXPECT_THROW(explain_fn(data, [](auto) { return 0.0; }, ""),
               ParameterError);
}

TEST(PredictBatch, SquaresAndEmpty) {
  auto data = numeric_data({"x1"}, {{2, 3}}, {4, 9});
  auto e = explain_fn(data, [](auto row) { return row[0] * row[0]; });
  EXPECT_EQ(predict_batch(*e, e->features()), (std::vector<double>{4, 9}));
  EXPECT_TRUE(predict_batch(*e, Rows(data->feature_schema(), 0)).empty());
}

TEST(PredictBatch, UnknownLevelIsLevelError) {
  Schema schema = {testing::categorical("c", {"blue", "red"}),
                   testing::numeric("y")};
  auto data = std::make_shared<const Dataset>(
      schema, std::vector<std::vector<double>>{{0, 1}, {0, 1}}, "y");
  auto e = explain_fn(data, [](auto row) { return row[0]; });
  Rows rows(data->feature_schema(), 1);
  rows(0, 0) = 2;  // "green" would land here: no such level
  EXPECT_THROW(predict_batch(*e, rows), LevelError);
}

TEST(PredictBatch, PartitionEqualsWhole) {
  auto data = testing::uniform_data(97, 3, 5);
  auto e = explain_fn(data, [](auto r) {
    return std::sin(r[0]) * r[1] + std::exp(r[2]);
  });
  const Rows all = e->features();
  const auto whole = predict_batch(*e, all);
  std::vector<double> pieces;
  for (std::size_t begin = 0; begin < all.n_rows(); begin += 10) {
    const auto part =
        predict_batch(*e, all.slice(begin, std::min(begin + 10, all.n_rows())));
    pieces.insert(pieces.end(), part.begin(), part.end());
  }
  ASSERT_EQ(pieces.size(), whole.size());
  for (std::size_t i = 0; i < whole.size(); ++i) {
    EXPECT_TRUE(testing::same_bits(pieces[i], whole[i]));
  }
}

TEST(ApplyOverrides, NumbersAndLevels) {
  Schema schema = {testing::numeric("x"),
                   testing::categorical("c", {"a", "b"}),
                   testing::numeric("y")};
  auto data = std::make_shared<const Dataset>(
      schema, std::vector<std::vector<double>>{{1, 2}, {0, 1}, {0, 1}}, "y");
  auto e = explain_fn(data, [](auto row) { return row[0]; });
  Instance i = instance_from_row(*e, 0);
  i = apply_overrides(*e, i, Json{{"x", 5}, {"c", "b"}});
  EXPECT_EQ(i.values, (std::vector<double>{5, 1}));
  EXPECT_THROW(apply_overrides(*e, i, Json{{"c", "z"}}), LevelError);
  EXPECT_THROW(apply_overrides(*e, i, Json{{"nope", 1}}), SchemaError);
  EXPECT_THROW(instance_from_row(*e, 9), ParameterError);
}

TEST(ModelPerformance, RegressionPayload) {
  auto data = numeric_data({"x"}, {{0, 1}}, {0, 2});
  auto e = explain_fn(data, [](auto) { return 0.0; }, "zero");
  const Explanation ex = model_performance(*e);
  EXPECT_EQ(ex.kind, "performance");
  EXPECT_EQ(ex.model_label, "zero");
  EXPECT_EQ(ex.result.strings("metric"),
            (std::vector<std::string>{"mse", "rmse", "mae", "r2"}));
  EXPECT_DOUBLE_EQ(ex.chart["metrics"]["r2"].get<double>(), -1.0);
}

TEST(ModelPerformance, SingleClassIsDegenerate) {
  auto data = numeric_data({"x"}, {{0, 1}}, {1, 1});
  auto e = explain_fn(data, [](auto) { return 0.7; }, "m",
                      TaskType::kClassification);
  EXPECT_THROW(model_performance(*e), DegenerateTargetError);
}

TEST(Serialize, ColumnOrientedRecord) {
  auto data = numeric_data({"x"}, {{0, 1}}, {0, 2});
  auto e = explain_fn(data, [](auto) { return 0.0; });
  const Json j = Json::parse(serialize(model_performance(*e)));
  for (const char* key : {"kind", "model_label", "result", "chart", "meta"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["result"]["columns"], Json({"metric", "value"}));
  EXPECT_EQ(j["result"]["values"].size(), 2);
  EXPECT_EQ(j["result"]["values"][0].size(), 4);
}

TEST(ResultTable, RejectsMismatchedLengths) {
  ResultTable t;
  t.add("a", std::vector<double>{1, 2});
  EXPECT_THROW(t.add("b", std::vector<double>{1}), std::invalid_argument);
  EXPECT_THROW(t.add("a", std::vector<double>{1, 2}), std::invalid_argument);
}

}  // namespace
}  // namespace exposition
