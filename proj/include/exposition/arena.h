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

// The dashboard service. `Arena` maps (method, path, body) to a response and
// holds all state; `ArenaServer` puts it behind HTTP.
//
//   GET  /api/info     version, models, column schema, row count, chart kinds
//   GET  /api/charts   chart kinds with required and optional parameters
//   POST /api/compute  {kind, model, params, seed} -> explanation payload
//   GET  /api/state    current dashboard state
//   PUT  /api/state    replace the dashboard state
//
// State document:
//   {"version": "1",
//    "charts": [{"kind", "models": [...], "params": {...}, "seed"}],
//    "pinned": [{"row", "overrides": {...}}],
//    "layout": [...]}

#ifndef EXPOSITION_ARENA_H_
#define EXPOSITION_ARENA_H_

#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "exposition/error.h"
#include "exposition/explainer.h"
#include "exposition/explanation.h"

namespace exposition {

inline constexpr std::string_view kStateVersion = "1";

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class Arena {
 public:
  // All explainers must share one dataset and carry unique labels.
  explicit Arena(std::vector<std::shared_ptr<const Explainer>> explainers);

  HttpResponse handle(std::string_view method, std::string_view path,
                      std::string_view body);

  Json info() const;
  Json state() const;
  // Validates and replaces the state. Throws StateConflict (409) when labels
  // do not resolve and InvalidParameters (422) for malformed documents.
  Json load_state(const Json& document);

  // Serialized explanation, served from the cache when possible. Records the
  // chart in the state.
  std::string compute(std::string_view kind, std::string_view label,
                      const Json& params, std::uint64_t seed);

  std::size_t cache_size() const;
  const Explainer* find(std::string_view label) const;

 private:
  void record_chart(const std::string& kind, const std::string& label,
                    const Json& params, std::uint64_t seed);

  std::vector<std::shared_ptr<const Explainer>> explainers_;

  mutable std::shared_mutex cache_mutex_;
  std::map<std::string, std::string> cache_;

  mutable std::shared_mutex state_mutex_;
  Json state_;
};

// Unknown model labels in a state document.
class StateConflict : public Error {
 public:
  explicit StateConflict(std::vector<std::string> unresolved);
  const std::vector<std::string>& unresolved() const { return unresolved_; }

 private:
  std::vector<std::string> unresolved_;
};

class UnknownModel : public Error {
 public:
  explicit UnknownModel(const std::string& label)
      : Error("UnknownModel", "no model labelled '" + label + "'") {}
};

class ArenaServer {
 public:
  // `ui_dir` is served at "/" when non-empty; otherwise a small placeholder
  // page is returned.
  ArenaServer(Arena& arena, std::string ui_dir = "");
  ~ArenaServer();

  // Binds the socket; port 0 picks a free port. Returns the bound port, or
  // -1 when binding fails.
  int bind(const std::string& host, int port);
  // Serves until stop(). Requires a successful bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace exposition

#endif  // EXPOSITION_ARENA_H_
