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

#include "exposition/dispatch.h"

#include <algorithm>
#include <functional>

#include "exposition/fairness.h"
#include "exposition/model_level.h"
#include "exposition/predict_level.h"

namespace exposition {
namespace {

enum class ParamType {
  kRow,          // Non-negative integer.
  kCount,        // Integer >= 1.
  kBool,
  kString,
  kNames,        // Array of strings.
  kObject,
  kUnitInterval  // Number in (0, 1).
};

struct ParamSpec {
  std::string name;
  ParamType type;
  bool required = false;
  std::vector<std::string> choices = {};
};

struct KindSpec {
  std::string kind;
  std::vector<ParamSpec> params;
};

const std::vector<KindSpec>& kind_specs() {
  static const std::vector<KindSpec> specs = {
      {"performance", {}},
      {"breakdown",
       {{"instance", ParamType::kRow, true},
        {"overrides", ParamType::kObject},
        {"order", ParamType::kNames},
        {"background_size", ParamType::kCount}}},
      {"shapley",
       {{"instance", ParamType::kRow, true},
        {"overrides", ParamType::kObject},
        {"b", ParamType::kCount},
        {"background_size", ParamType::kCount},
        {"full_enumeration", ParamType::kBool}}},
      {"cp",
       {{"instance", ParamType::kRow, true},
        {"overrides", ParamType::kObject},
        {"variables", ParamType::kNames},
        {"grid_size", ParamType::kCount},
        {"uniform_grid", ParamType::kBool}}},
      {"importance",
       {{"loss", ParamType::kString, false, {"rmse", "one_minus_auc"}},
        {"mode", ParamType::kString, false, {"raw", "difference", "ratio"}},
        {"b", ParamType::kCount},
        {"sample_size", ParamType::kCount}}},
      {"profile",
       {{"profile_kind", ParamType::kString, false, {"pdp", "ale", "ice"}},
        {"variables", ParamType::kNames},
        {"grid_size", ParamType::kCount},
        {"sample_size", ParamType::kCount},
        {"center_ice", ParamType::kBool}}},
      {"residuals", {}},
      {"surrogate",
       {{"max_depth", ParamType::kCount}, {"min_leaf", ParamType::kCount}}},
      {"fairness",
       {{"protected", ParamType::kString, true},
        {"privileged", ParamType::kString, true},
        {"epsilon", ParamType::kUnitInterval},
        {"cutoffs", ParamType::kObject}}},
  };
  return specs;
}

const KindSpec& spec_for(std::string_view kind) {
  for (const auto& spec : kind_specs()) {
    if (spec.kind == kind) return spec;
  }
  throw ParameterError("unknown chart kind '" + std::string(kind) + "'");
}

std::string check_type(const ParamSpec& spec, const Json& value) {
  switch (spec.type) {
    case ParamType::kRow:
      if (!value.is_number_integer() || value.get<long long>() < 0) {
        return "must be a non-negative integer";
      }
      return "";
    case ParamType::kCount:
      if (!value.is_number_integer() || value.get<long long>() < 1) {
        return "must be an integer >= 1";
      }
      return "";
    case ParamType::kBool:
      return value.is_boolean() ? "" : "must be a boolean";
    case ParamType::kString:
      if (!value.is_string()) return "must be a string";
      if (!spec.choices.empty() &&
          std::find(spec.choices.begin(), spec.choices.end(),
                    value.get<std::string>()) == spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) {
          allowed += (allowed.empty() ? "" : ", ") + c;
        }
        return "must be one of: " + allowed;
      }
      return "";
    case ParamType::kNames:
      if (!value.is_array() ||
          !std::all_of(value.begin(), value.end(),
                       [](const Json& v) { return v.is_string(); })) {
        return "must be an array of variable names";
      }
      return "";
    case ParamType::kObject:
      return value.is_object() ? "" : "must be an object";
    case ParamType::kUnitInterval:
      if (!value.is_number() || !(value.get<double>() > 0.0) ||
          !(value.get<double>() < 1.0)) {
        return "must be a number in (0, 1)";
      }
      return "";
  }
  return "";
}

template <typename T>
T get_or(const Json& params, const char* key, T fallback) {
  return params.contains(key) ? params[key].get<T>() : fallback;
}

std::optional<std::vector<std::string>> names_or_none(const Json& params,
                                                      const char* key) {
  if (!params.contains(key)) return std::nullopt;
  return params[key].get<std::vector<std::string>>();
}

InvalidParameters invalid(const std::string& field, const std::string& problem) {
  return InvalidParameters(std::map<std::string, std::string>{{field, problem}});
}

}  // namespace

InvalidParameters::InvalidParameters(std::map<std::string, std::string> fields)
    : ParameterError([&fields] {
        std::string message = "invalid parameters:";
        for (const auto& [name, problem] : fields) {
          message += " " + name + " " + problem + ";";
        }
        message.pop_back();
        return message;
      }()),
      fields_(std::move(fields)) {}

const std::vector<std::string>& chart_kinds() {
  static const std::vector<std::string> kinds = [] {
    std::vector<std::string> out;
    for (const auto& spec : kind_specs()) out.push_back(spec.kind);
    return out;
  }();
  return kinds;
}

bool is_chart_kind(std::string_view kind) {
  const auto& kinds = chart_kinds();
  return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

bool is_predict_level(std::string_view kind) {
  return kind == "breakdown" || kind == "shapley" || kind == "cp";
}

Json chart_catalog() {
  Json out = Json::array();
  for (const auto& spec : kind_specs()) {
    Json required = Json::array(), optional = Json::array();
    for (const auto& p : spec.params) {
      (p.required ? required : optional).push_back(p.name);
    }
    out.push_back({{"kind", spec.kind},
                   {"predict_level", is_predict_level(spec.kind)},
                   {"required", std::move(required)},
                   {"optional", std::move(optional)}});
  }
  return out;
}

void validate_params(std::string_view kind, const Json& params) {
  const KindSpec& spec = spec_for(kind);
  std::map<std::string, std::string> problems;
  if (!params.is_null() && !params.is_object()) {
    throw invalid("params", "must be an object");
  }
  if (params.is_object()) {
    for (const auto& [key, value] : params.items()) {
      const auto it = std::find_if(
          spec.params.begin(), spec.params.end(),
          [&key](const ParamSpec& p) { return p.name == key; });
      if (it == spec.params.end()) {
        problems[key] = "is not a parameter of '" + spec.kind + "'";
        continue;
      }
      if (auto problem = check_type(*it, value); !problem.empty()) {
        problems[key] = std::move(problem);
      }
    }
  }
  for (const auto& p : spec.params) {
    if (p.required && (!params.is_object() || !params.contains(p.name))) {
      problems[p.name] = "is required";
    }
  }
  if (!problems.empty()) throw InvalidParameters(std::move(problems));
}

Explanation compute_explanation(const Explainer& explainer,
                                std::string_view kind, const Json& raw_params,
                                std::uint64_t seed) {
  validate_params(kind, raw_params);
  const Json params = raw_params.is_null() ? Json::object() : raw_params;

  auto instance = [&] {
    const auto row = params["instance"].get<std::size_t>();
    if (row >= explainer.data().n_rows()) {
      throw invalid("instance", "row " + std::to_string(row) +
                                    " out of range (" +
                                    std::to_string(explainer.data().n_rows()) +
                                    " rows)");
    }
    Instance base = instance_from_row(explainer, row);
    if (!params.contains("overrides")) return base;
    try {
      return apply_overrides(explainer, std::move(base), params["overrides"]);
    } catch (const Error& e) {
      throw invalid("overrides", e.what());
    }
  };

  Explanation out;
  if (kind == "performance") {
    out = model_performance(explainer);
  } else if (kind == "breakdown") {
    BreakDownOptions options;
    options.order = names_or_none(params, "order");
    options.background_size =
        get_or<std::size_t>(params, "background_size", options.background_size);
    options.seed = seed;
    out = break_down(explainer, instance(), options);
  } else if (kind == "shapley") {
    ShapleyOptions options;
    options.b = get_or<std::size_t>(params, "b", options.b);
    options.background_size =
        get_or<std::size_t>(params, "background_size", options.background_size);
    options.full_enumeration =
        get_or<bool>(params, "full_enumeration", options.full_enumeration);
    options.seed = seed;
    out = shapley_values(explainer, instance(), options);
  } else if (kind == "cp") {
    CeterisParibusOptions options;
    options.variables = names_or_none(params, "variables");
    options.grid_size = get_or<std::size_t>(params, "grid_size", options.grid_size);
    options.uniform_grid = get_or<bool>(params, "uniform_grid", false);
    out = ceteris_paribus(explainer, instance(), options);
  } else if (kind == "importance") {
    ImportanceOptions options;
    if (params.contains("loss")) {
      options.loss = parse_loss(params["loss"].get<std::string>());
    }
    if (params.contains("mode")) {
      options.mode = parse_mode(params["mode"].get<std::string>());
    }
    options.b = get_or<std::size_t>(params, "b", options.b);
    options.sample_size =
        get_or<std::size_t>(params, "sample_size", options.sample_size);
    options.seed = seed;
    out = permutation_importance(explainer, options);
  } else if (kind == "profile") {
    ProfileOptions options;
    if (params.contains("profile_kind")) {
      options.kind = parse_profile_kind(params["profile_kind"].get<std::string>());
    }
    options.variables = names_or_none(params, "variables");
    options.grid_size = get_or<std::size_t>(params, "grid_size", options.grid_size);
    options.sample_size =
        get_or<std::size_t>(params, "sample_size", options.sample_size);
    options.center_ice = get_or<bool>(params, "center_ice", options.center_ice);
    options.seed = seed;
    out = model_profile(explainer, options);
  } else if (kind == "residuals") {
    out = residual_diagnostics(explainer);
  } else if (kind == "surrogate") {
    SurrogateOptions options;
    options.max_depth = get_or<std::size_t>(params, "max_depth", options.max_depth);
    options.min_leaf = get_or<std::size_t>(params, "min_leaf", options.min_leaf);
    out = fit_surrogate_tree(explainer, options);
  } else if (kind == "fairness") {
    FairnessOptions options;
    options.protected_column = params["protected"].get<std::string>();
    options.privileged = params["privileged"].get<std::string>();
    options.epsilon = get_or<double>(params, "epsilon", options.epsilon);
    if (params.contains("cutoffs")) {
      for (const auto& [name, value] : params["cutoffs"].items()) {
        if (!value.is_number()) {
          throw invalid("cutoffs", "values must be numbers");
        }
        options.cutoffs[name] = value.get<double>();
      }
    }
    out = fairness_check(explainer, options);
  }
  out.meta["seed"] = seed;
  if (is_predict_level(kind)) {
    out.meta["instance_row"] = params["instance"];
    if (params.contains("overrides")) out.meta["overrides"] = params["overrides"];
  }
  return out;
}

}  // namespace exposition
