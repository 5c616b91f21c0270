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

// Method dispatch by chart kind. The CLI and the arena service both go through
// compute_explanation, which is what makes their payloads byte-identical.
//
// Parameters are a JSON object. Recognized keys per kind:
//   performance  -
//   breakdown    instance*, overrides, order, background_size
//   shapley      instance*, overrides, b, background_size, full_enumeration
//   cp           instance*, overrides, variables, grid_size, uniform_grid
//   importance   loss, mode, b, sample_size
//   profile      profile_kind, variables, grid_size, sample_size, center_ice
//   residuals    -
//   surrogate    max_depth, min_leaf
//   fairness     protected*, privileged*, epsilon, cutoffs
// (* required)

#ifndef EXPOSITION_DISPATCH_H_
#define EXPOSITION_DISPATCH_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "exposition/error.h"
#include "exposition/explainer.h"
#include "exposition/explanation.h"

namespace exposition {

inline constexpr std::string_view kVersion = "1.0.0";

const std::vector<std::string>& chart_kinds();
bool is_chart_kind(std::string_view kind);
// Kinds that explain a single observation and need `instance`.
bool is_predict_level(std::string_view kind);

// [{kind, required: [...], optional: [...]}] for every kind.
Json chart_catalog();

// Parameter validation failure with one message per offending field.
class InvalidParameters : public ParameterError {
 public:
  explicit InvalidParameters(std::map<std::string, std::string> fields);
  const std::map<std::string, std::string>& fields() const { return fields_; }

 private:
  std::map<std::string, std::string> fields_;
};

// Checks names and types of `params` for `kind` without computing anything.
// Throws InvalidParameters (or ParameterError for an unknown kind).
void validate_params(std::string_view kind, const Json& params);

// Runs the method named by `kind` on the explainer. `meta.seed` is always
// recorded.
Explanation compute_explanation(const Explainer& explainer,
                                std::string_view kind, const Json& params,
                                std::uint64_t seed);

}  // namespace exposition

#endif  // EXPOSITION_DISPATCH_H_
