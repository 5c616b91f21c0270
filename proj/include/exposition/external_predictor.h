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

// A predictor that lives in another process.
//
// The child is spawned on first use and kept alive across calls. Each call
// writes one request line to its standard input
//   {"columns": ["x1", "c"], "rows": [[1.5, "red"], [2, "blue"]]}
// and reads one response line from its standard output
//   {"predictions": [0.25, 0.75]}
// Numbers are written with 17 significant digits so doubles survive the trip
// unchanged; categorical cells are sent as level names. Calls are serialized:
// one request is in flight at a time.

#ifndef EXPOSITION_EXTERNAL_PREDICTOR_H_
#define EXPOSITION_EXTERNAL_PREDICTOR_H_

#include <chrono>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "exposition/dataset.h"
#include "exposition/predictor.h"

namespace exposition {

// Encodes the request line (without the trailing newline).
std::string encode_request(const Rows& rows);

// Parses a response line; ProtocolError unless it holds exactly
// `expected` finite numbers.
std::vector<double> decode_response(const std::string& line,
                                    std::size_t expected);

// Server side of the protocol. decode_request maps the named columns onto
// `schema` (order may differ; every schema column must be present) and
// raises ProtocolError on malformed lines. encode_response writes numbers with
// 17 significant digits.
Rows decode_request(const std::string& line,
                    const std::shared_ptr<const Schema>& schema);
std::string encode_response(std::span<const double> predictions);

class ExternalPredictor : public Predictor {
 public:
  ExternalPredictor(std::vector<std::string> command,
                    std::chrono::milliseconds timeout);
  ~ExternalPredictor() override;

  ExternalPredictor(const ExternalPredictor&) = delete;
  ExternalPredictor& operator=(const ExternalPredictor&) = delete;

  // TimeoutError when no full response arrives within the timeout (the child
  // is killed and respawned on the next call). ProtocolError on malformed or
  // short responses, or when the child exits; the message then carries the
  // child's standard error.
  std::vector<double> predict(const Rows& rows) const override;

  const std::vector<std::string>& command() const { return command_; }

 private:
  void spawn() const;
  void shutdown() const;
  std::string child_stderr() const;

  std::vector<std::string> command_;
  std::chrono::milliseconds timeout_;

  mutable std::mutex mutex_;
  mutable int pid_ = -1;
  mutable int to_child_ = -1;
  mutable int from_child_ = -1;
  mutable int stderr_fd_ = -1;
  mutable std::string pending_;  // Bytes read past the last newline.
};

}  // namespace exposition

#endif  // EXPOSITION_EXTERNAL_PREDICTOR_H_
