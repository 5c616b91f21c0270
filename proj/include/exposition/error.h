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

#ifndef EXPOSITION_ERROR_H_
#define EXPOSITION_ERROR_H_

#include <stdexcept>
#include <string>

namespace exposition {

// Root of every error raised by the library. `kind()` is a stable identifier
// used by the CLI and the HTTP service when reporting failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define EXPOSITION_DEFINE_ERROR(Name)                               \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

// Data loading.
EXPOSITION_DEFINE_ERROR(ParseError);
EXPOSITION_DEFINE_ERROR(MissingValueError);
EXPOSITION_DEFINE_ERROR(SchemaError);
EXPOSITION_DEFINE_ERROR(LevelError);

// Predictor contract.
EXPOSITION_DEFINE_ERROR(NonDeterministicPredictorError);
EXPOSITION_DEFINE_ERROR(PredictorContractError);
EXPOSITION_DEFINE_ERROR(RangeError);

// Methods.
EXPOSITION_DEFINE_ERROR(ParameterError);
EXPOSITION_DEFINE_ERROR(DegenerateTargetError);
EXPOSITION_DEFINE_ERROR(SingularError);

// External predictors.
EXPOSITION_DEFINE_ERROR(TimeoutError);
EXPOSITION_DEFINE_ERROR(ProtocolError);

#undef EXPOSITION_DEFINE_ERROR

}  // namespace exposition

#endif  // EXPOSITION_ERROR_H_
