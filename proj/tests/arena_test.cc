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

#include "exposition/arena.h"

#include <memory>
#include <thread>

#include "exposition/dispatch.h"
#include "exposition/error.h"
#include "exposition/reference_models.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "test_util.h"

namespace exposition {
namespace {

std::shared_ptr<const Dataset> small_data() {
  return std::make_shared<const Dataset>(load_dataset_text(
      "x1,x2,g,y\n"
      "0.1,1.0,a,1\n0.5,0.2,b,0\n0.9,0.4,a,1\n0.3,0.8,b,0\n"
      "0.7,0.6,a,1\n0.2,0.1,b,0\n0.8,0.9,a,1\n0.4,0.3,b,1\n"
      "0.6,0.5,a,0\n0.05,0.7,b,0\n",
      "y"));
}

std::vector<std::shared_ptr<const Explainer>> two_models() {
  auto data = small_data();
  auto lin = std::make_shared<const Explainer>(
      std::make_shared<LinearModel>(fit_linear(*data)), data, "lin");
  auto tree = std::make_shared<const Explainer>(
      std::make_shared<TreeModel>(fit_tree(*data, {2, 1})), data, "tree");
  return {lin, tree};
}

Json body(const HttpResponse& r) { return Json::parse(r.body); }

// --- Parameter validation ---------------------------------------------------

TEST(Dispatch, CatalogCoversAllKinds) {
  const Json catalog = chart_catalog();
  ASSERT_EQ(catalog.size(), chart_kinds().size());
  EXPECT_EQ(chart_kinds().size(), 9);
  for (const Json& c : catalog) {
    EXPECT_EQ(c["predict_level"].get<bool>(),
              is_predict_level(c["kind"].get<std::string>()));
  }
}

TEST(Dispatch, ValidateReportsEveryField) {
  try {
    validate_params("shapley", Json{{"b", 0}, {"colour", "red"}});
    FAIL();
  } catch (const InvalidParameters& e) {
    EXPECT_EQ(e.fields().size(), 3);
    EXPECT_EQ(e.fields().at("instance"), "is required");
    EXPECT_TRUE(e.fields().contains("b"));
    EXPECT_TRUE(e.fields().contains("colour"));
  }
  EXPECT_THROW(validate_params("importance", Json{{"loss", "mae"}}),
               InvalidParameters);
  EXPECT_THROW(validate_params("fairness", Json{{"protected", "g"},
                                                {"privileged", "a"},
                                                {"epsilon", 1.0}}),
               InvalidParameters);
  EXPECT_THROW(validate_params("nope", Json::object()), ParameterError);
  EXPECT_NO_THROW(validate_params("performance", Json()));
}

TEST(Dispatch, InstanceOutOfRange) {
  const auto models = two_models();
  try {
    compute_explanation(*models[0], "breakdown", Json{{"instance", 10}}, 42);
    FAIL();
  } catch (const InvalidParameters& e) {
    EXPECT_TRUE(e.fields().contains("instance"));
  }
}

TEST(Dispatch, BadOverrideIsFieldError) {
  const auto models = two_models();
  try {
    compute_explanation(*models[0], "cp",
                        Json{{"instance", 0}, {"overrides", {{"g", "zz"}}}}, 42);
    FAIL();
  } catch (const InvalidParameters& e) {
    EXPECT_TRUE(e.fields().contains("overrides"));
  }
}

TEST(Dispatch, EveryKindRunsAndRecordsSeed) {
  const auto models = two_models();
  const std::map<std::string, Json> params = {
      {"performance", Json::object()},
      {"breakdown", {{"instance", 1}}},
      {"shapley", {{"instance", 1}, {"b", 5}}},
      {"cp", {{"instance", 1}, {"grid_size", 5}}},
      {"importance", {{"b", 3}}},
      {"profile", {{"grid_size", 5}}},
      {"residuals", Json::object()},
      {"surrogate", {{"max_depth", 2}, {"min_leaf", 1}}},
      {"fairness", {{"protected", "g"}, {"privileged", "a"}}},
  };
  for (const auto& kind : chart_kinds()) {
    const Explanation e = compute_explanation(*models[1], kind, params.at(kind), 7);
    EXPECT_EQ(e.meta["seed"], 7) << kind;
    EXPECT_EQ(e.model_label, "tree") << kind;
    if (is_predict_level(kind)) EXPECT_EQ(e.meta["instance_row"], 1) << kind;
  }
}

// --- Arena ------------------------------------------------------------------

TEST(Arena, RejectsBadModelSets) {
  EXPECT_THROW(Arena({}), ParameterError);
  auto models = two_models();
  EXPECT_THROW(Arena({models[0], models[0]}), ParameterError);
  auto other = std::make_shared<const Explainer>(
      std::make_shared<LinearModel>(fit_linear(*small_data())), small_data(),
      "other");
  EXPECT_THROW(Arena({models[0], other}), ParameterError);
}

TEST(Arena, InfoAndCharts) {
  Arena arena(two_models());
  const HttpResponse r = arena.handle("GET", "/api/info", "");
  ASSERT_EQ(r.status, 200);
  const Json info = body(r);
  EXPECT_EQ(info["models"], Json({"lin", "tree"}));
  EXPECT_EQ(info["n_rows"], 10);
  EXPECT_EQ(info["target"], "y");
  EXPECT_EQ(info["columns"].size(), 4);
  EXPECT_EQ(info["columns"][2]["levels"], Json({"a", "b"}));
  EXPECT_EQ(info["columns"][3]["role"], "target");
  const HttpResponse c = arena.handle("GET", "/api/charts", "");
  EXPECT_EQ(c.status, 200);
  EXPECT_EQ(body(c), chart_catalog());
}

TEST(Arena, ComputeMatchesDirectComputationAndCaches) {
  const auto models = two_models();
  Arena arena(models);
  const std::string request =
      R"({"kind":"shapley","model":"tree","params":{"instance":3,"b":4},"seed":9})";
  const HttpResponse first = arena.handle("POST", "/api/compute", request);
  ASSERT_EQ(first.status, 200) << first.body;
  EXPECT_EQ(first.body,
            serialize(compute_explanation(
                *models[1], "shapley", Json{{"instance", 3}, {"b", 4}}, 9)));
  EXPECT_EQ(arena.cache_size(), 1);
  const HttpResponse second = arena.handle("POST", "/api/compute", request);
  EXPECT_EQ(second.body, first.body);
  EXPECT_EQ(arena.cache_size(), 1);
}

TEST(Arena, ErrorStatuses) {
  Arena arena(two_models());
  EXPECT_EQ(arena.handle("POST", "/api/compute",
                         R"({"kind":"performance","model":"nope"})")
                .status,
            404);
  const HttpResponse bad_kind = arena.handle(
      "POST", "/api/compute", R"({"kind":"pie","model":"lin","extra":1})");
  EXPECT_EQ(bad_kind.status, 422);
  EXPECT_TRUE(body(bad_kind)["fields"].contains("kind"));
  EXPECT_TRUE(body(bad_kind)["fields"].contains("extra"));
  const HttpResponse missing = arena.handle(
      "POST", "/api/compute", R"({"kind":"breakdown","model":"lin"})");
  EXPECT_EQ(missing.status, 422);
  EXPECT_TRUE(body(missing)["fields"].contains("instance"));
  EXPECT_EQ(arena.handle("POST", "/api/compute", "{not json").status, 400);
  EXPECT_EQ(arena.handle("DELETE", "/api/info", "").status, 405);
  EXPECT_EQ(arena.handle("GET", "/api/nothing", "").status, 404);
  const HttpResponse unresolved = arena.handle(
      "PUT", "/api/state",
      R"({"version":"1","charts":[{"kind":"residuals","models":["ghost"],"params":{"bogus":1}}]})");
  EXPECT_EQ(unresolved.status, 409);
  EXPECT_EQ(body(unresolved)["unresolved"], Json({"ghost"}));
  const HttpResponse invalid = arena.handle(
      "PUT", "/api/state",
      R"({"version":"1","charts":[{"kind":"cp","models":["lin"],"params":{"instance":99}}]})");
  EXPECT_EQ(invalid.status, 422);
  EXPECT_TRUE(body(invalid)["fields"].contains("charts[0].params.instance"));
}

TEST(Arena, EmptyStateIsValid) {
  Arena arena(two_models());
  const Json state = body(arena.handle("GET", "/api/state", ""));
  EXPECT_EQ(state["version"], "1");
  EXPECT_TRUE(state["charts"].empty());
  const HttpResponse r = arena.handle("PUT", "/api/state", state.dump());
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(body(r), state);
}

TEST(Arena, StateRoundTripReproducesCharts) {
  const auto models = two_models();
  Arena first(models);
  const std::vector<std::string> requests = {
      R"({"kind":"breakdown","model":"lin","params":{"instance":2}})",
      R"({"kind":"breakdown","model":"tree","params":{"instance":2}})",
      R"({"kind":"importance","model":"tree","params":{"b":3},"seed":5})",
  };
  std::vector<std::string> payloads;
  for (const auto& r : requests) {
    payloads.push_back(first.handle("POST", "/api/compute", r).body);
  }
  const Json state = first.state();
  ASSERT_EQ(state["charts"].size(), 2);
  EXPECT_EQ(state["charts"][0]["models"], Json({"lin", "tree"}));

  Arena second(models);
  ASSERT_EQ(second.handle("PUT", "/api/state", state.dump()).status, 200);
  EXPECT_EQ(second.state(), state);
  EXPECT_EQ(second.compute("breakdown", "lin", Json{{"instance", 2}}, 42),
            payloads[0]);
  EXPECT_EQ(second.compute("breakdown", "tree", Json{{"instance", 2}}, 42),
            payloads[1]);
  EXPECT_EQ(second.compute("importance", "tree", Json{{"b", 3}}, 5), payloads[2]);
}

TEST(Arena, PinnedOverridesValidated) {
  Arena arena(two_models());
  EXPECT_EQ(arena.handle("PUT", "/api/state",
                         R"({"pinned":[{"row":1,"overrides":{"x1":0.5}}]})")
                .status,
            200);
  EXPECT_EQ(arena.handle("PUT", "/api/state",
                         R"({"pinned":[{"row":1,"overrides":{"zz":0.5}}]})")
                .status,
            422);
  EXPECT_EQ(arena.handle("PUT", "/api/state", R"({"colour":"red"})").status, 422);
}

TEST(ArenaServer, ServesOverHttp) {
  Arena arena(two_models());
  ArenaServer server(arena);
  const int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread loop([&server] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  auto info = client.Get("/api/info");
  ASSERT_TRUE(info);
  EXPECT_EQ(info->status, 200);
  EXPECT_EQ(info->get_header_value("Access-Control-Allow-Origin"), "*");
  auto computed = client.Post("/api/compute",
                              R"({"kind":"residuals","model":"lin"})",
                              "application/json");
  ASSERT_TRUE(computed);
  EXPECT_EQ(computed->status, 200);
  EXPECT_EQ(computed->body, arena.compute("residuals", "lin", Json(), 42));
  auto missing = client.Get("/api/none");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto root = client.Get("/");
  ASSERT_TRUE(root);
  EXPECT_EQ(root->status, 200);

  ArenaServer rival(arena);
  EXPECT_EQ(rival.bind("127.0.0.1", port), -1);

  server.stop();
  loop.join();
}

}  // namespace
}  // namespace exposition
