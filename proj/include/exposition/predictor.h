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

#ifndef EXPOSITION_PREDICTOR_H_
#define EXPOSITION_PREDICTOR_H_

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "exposition/dataset.h"

namespace exposition {

// Black-box scoring contract: one real-valued score per input row.
//
// Implementations must be pure (identical rows give identical scores, whatever
// the batch they appear in) and safe to call concurrently. A predictor that
// cannot be called concurrently must serialize calls internally.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<double> predict(const Rows& rows) const = 0;
};

// Row-wise predictor over a plain function. Mostly for tests and demos.
class FunctionPredictor : public Predictor {
 public:
  using RowFunction = std::function<double(std::span<const double>)>;

  explicit FunctionPredictor(RowFunction fn) : fn_(std::move(fn)) {}

  std::vector<double> predict(const Rows& rows) const override {
    std::vector<double> out(rows.n_rows());
    for (std::size_t r = 0; r < rows.n_rows(); ++r) out[r] = fn_(rows.row(r));
    return out;
  }

 private:
  RowFunction fn_;
};

}  // namespace exposition

#endif  // EXPOSITION_PREDICTOR_H_
