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

#include "exposition/cli.h"

#include <signal.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "exposition/arena.h"
#include "exposition/dataset.h"
#include "exposition/dispatch.h"
#include "exposition/error.h"
#include "exposition/explainer.h"
#include "exposition/parallel.h"
#include "exposition/reference_models.h"

namespace exposition {
namespace {

struct ModelFlag {
  std::string path;
  std::string label;
};

struct Config {
  std::string data;
  std::string target;
  std::vector<std::string> models;
  std::optional<std::string> task;
  std::uint64_t seed = 42;

  // explain
  std::string kind;
  std::string out;
  std::optional<long long> instance;
  std::vector<std::string> variables;
  std::vector<std::string> order;
  std::vector<std::string> overrides;
  std::vector<std::string> cutoffs;
  std::optional<std::string> protected_column, privileged;
  std::optional<double> epsilon;
  std::optional<long long> grid_size, b, sample_size, background_size;
  std::optional<long long> max_depth, min_leaf;
  std::optional<std::string> profile_kind, loss, mode;
  bool full_enumeration = false;
  bool uniform_grid = false;
  bool no_center_ice = false;

  // serve
  std::string host = "127.0.0.1";
  int port = 8042;
  std::string state;
  std::string ui_dir;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ModelFlag parse_model_flag(const std::string& flag) {
  ModelFlag out;
  const auto colon = flag.rfind(':');
  if (colon == std::string::npos) {
    out.path = flag;
    out.label = std::filesystem::path(flag).stem().string();
  } else {
    out.path = flag.substr(0, colon);
    out.label = flag.substr(colon + 1);
  }
  if (out.path.empty() || out.label.empty()) {
    throw UsageError("--model expects path[:label], got '" + flag + "'");
  }
  return out;
}

std::vector<ModelFlag> parse_models(const std::vector<std::string>& flags) {
  std::vector<ModelFlag> out;
  std::set<std::string> seen;
  for (const auto& f : flags) {
    out.push_back(parse_model_flag(f));
    if (!seen.insert(out.back().label).second) {
      throw UsageError("duplicate model label '" + out.back().label + "'");
    }
  }
  return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& text,
                                                     const char* flag) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError(std::string(flag) + " expects name=value, got '" + text +
                     "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

// Only flags the user actually gave end up in the parameters, so that
// validate_params reports flags that do not apply to the kind.
Json build_params(const Config& c) {
  Json p = Json::object();
  if (c.instance) p["instance"] = *c.instance;
  if (!c.variables.empty()) p["variables"] = c.variables;
  if (!c.order.empty()) p["order"] = c.order;
  if (c.protected_column) p["protected"] = *c.protected_column;
  if (c.privileged) p["privileged"] = *c.privileged;
  if (c.epsilon) p["epsilon"] = *c.epsilon;
  if (c.grid_size) p["grid_size"] = *c.grid_size;
  if (c.b) p["b"] = *c.b;
  if (c.sample_size) p["sample_size"] = *c.sample_size;
  if (c.background_size) p["background_size"] = *c.background_size;
  if (c.max_depth) p["max_depth"] = *c.max_depth;
  if (c.min_leaf) p["min_leaf"] = *c.min_leaf;
  if (c.profile_kind) p["profile_kind"] = *c.profile_kind;
  if (c.loss) p["loss"] = *c.loss;
  if (c.mode) p["mode"] = *c.mode;
  if (c.full_enumeration) p["full_enumeration"] = true;
  if (c.uniform_grid) p["uniform_grid"] = true;
  if (c.no_center_ice) p["center_ice"] = false;
  if (!c.overrides.empty()) {
    Json o = Json::object();
    for (const auto& text : c.overrides) {
      auto [name, value] = split_assignment(text, "--override");
      if (auto number = parse_number(value)) {
        o[name] = *number;
      } else {
        o[name] = value;
      }
    }
    p["overrides"] = std::move(o);
  }
  if (!c.cutoffs.empty()) {
    Json o = Json::object();
    for (const auto& text : c.cutoffs) {
      auto [name, value] = split_assignment(text, "--cutoff");
      auto number = parse_number(value);
      if (!number) throw UsageError("--cutoff value must be a number");
      o[name] = *number;
    }
    p["cutoffs"] = std::move(o);
  }
  return p;
}

std::optional<TaskType> parse_task(const std::optional<std::string>& task) {
  if (!task) return std::nullopt;
  if (*task == "regression") return TaskType::kRegression;
  if (*task == "classification") return TaskType::kClassification;
  throw UsageError("--task must be regression or classification");
}

std::vector<std::shared_ptr<const Explainer>> build_explainers(
    const Config& c, const std::vector<ModelFlag>& models) {
  auto data = std::make_shared<const Dataset>(load_dataset_file(c.data, c.target));
  const auto task = parse_task(c.task);
  std::vector<std::shared_ptr<const Explainer>> out;
  for (const auto& m : models) {
    auto predictor = load_model_file(m.path, *data);
    out.push_back(std::make_shared<const Explainer>(std::move(predictor), data,
                                                    m.label, task, c.seed));
  }
  return out;
}

void add_common(CLI::App& app, Config& c) {
  app.add_option("--data", c.data, "CSV file with a header row")->required();
  app.add_option("--target", c.target, "Target column")->required();
  app.add_option("--model", c.models,
                 "Model specification as path[:label] (repeatable)")
      ->required();
  app.add_option("--task", c.task, "regression or classification");
  app.add_option("--seed", c.seed, "Random seed")->capture_default_str();
}

void add_explain(CLI::App& app, Config& c) {
  app.add_option("--kind", c.kind, "Explanation kind")->required();
  app.add_option("--out", c.out, "Output file (default: standard output)");
  app.add_option("--instance", c.instance, "Row index to explain");
  app.add_option("--variables,--variable", c.variables, "Variables to profile")
      ->delimiter(',');
  app.add_option("--order", c.order, "Break-down variable order")
      ->delimiter(',');
  app.add_option("--override", c.overrides, "What-if value name=value");
  app.add_option("--protected", c.protected_column, "Protected column");
  app.add_option("--privileged", c.privileged, "Privileged subgroup");
  app.add_option("--epsilon", c.epsilon, "Fairness tolerance in (0, 1)");
  app.add_option("--cutoff", c.cutoffs, "Per-subgroup cutoff group=value");
  app.add_option("--grid-size", c.grid_size, "Profile grid size");
  app.add_option("--b", c.b, "Orderings or permutation repeats");
  app.add_option("--sample-size", c.sample_size, "Row sample size");
  app.add_option("--background-size", c.background_size,
                 "Background sample size");
  app.add_option("--max-depth", c.max_depth, "Surrogate tree depth");
  app.add_option("--min-leaf", c.min_leaf, "Surrogate minimum leaf size");
  app.add_option("--profile-kind", c.profile_kind, "pdp, ale or ice");
  app.add_option("--loss", c.loss, "rmse or one_minus_auc");
  app.add_option("--mode", c.mode, "raw, difference or ratio");
  app.add_flag("--full-enumeration", c.full_enumeration,
               "Enumerate all orderings (at most 8 features)");
  app.add_flag("--uniform-grid", c.uniform_grid, "Evenly spaced grid");
  app.add_flag("--no-center-ice", c.no_center_ice, "Do not center ICE curves");
}

int explain(const Config& c, std::ostream& out, std::ostream& err) {
  if (!is_chart_kind(c.kind)) {
    std::string kinds;
    for (const auto& k : chart_kinds()) kinds += " " + k;
    throw UsageError("unknown kind '" + c.kind + "'; expected one of:" + kinds);
  }
  const auto models = parse_models(c.models);
  const Json params = build_params(c);
  validate_params(c.kind, params);

  const auto explainers = build_explainers(c, models);
  std::vector<std::string> payloads(explainers.size());
  parallel_for(explainers.size(), [&](std::size_t i) {
    payloads[i] =
        serialize(compute_explanation(*explainers[i], c.kind, params, c.seed));
  });

  std::string document;
  if (payloads.size() == 1) {
    document = payloads.front();
  } else {
    document = "[";
    for (std::size_t i = 0; i < payloads.size(); ++i) {
      if (i > 0) document += ",";
      document += payloads[i];
    }
    document += "]";
  }
  if (c.out.empty()) {
    out << document << "\n";
    return kExitOk;
  }
  std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
  file << document;
  file.close();
  if (!file) {
    err << "error: cannot write " << c.out << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int serve(const Config& c, std::ostream& err) {
  const auto models = parse_models(c.models);
  Arena arena(build_explainers(c, models));
  if (!c.state.empty()) {
    std::ifstream file(c.state, std::ios::binary);
    if (!file) throw ParseError("cannot open state file " + c.state);
    Json document;
    try {
      document = Json::parse(file);
    } catch (const Json::exception& e) {
      throw ParseError("state file is not valid JSON: " + std::string(e.what()));
    }
    arena.load_state(document);
  }

  // Handle termination on a dedicated thread so stop() never runs inside a
  // signal handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ArenaServer server(arena, c.ui_dir);
  const int port = server.bind(c.host, c.port);
  if (port < 0) {
    err << "error: cannot bind " << c.host << ":" << c.port
        << " (port in use?)\n";
    return kExitFailure;
  }
  err << "serving on http://" << c.host << ":" << port << "\n" << std::flush;
  std::jthread waiter([&server, signals] {
    int received = 0;
    sigwait(&signals, &received);
    server.stop();
  });
  server.listen();
  // listen() may also return on its own; release the waiter in that case.
  pthread_kill(waiter.native_handle(), SIGTERM);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Model-agnostic explanations for tabular predictors",
               "exposition"};
  app.require_subcommand(1);
  Config config;
  CLI::App* explain_cmd =
      app.add_subcommand("explain", "Compute an explanation per model");
  add_common(*explain_cmd, config);
  add_explain(*explain_cmd, config);
  CLI::App* serve_cmd =
      app.add_subcommand("serve", "Run the dashboard service");
  add_common(*serve_cmd, config);
  serve_cmd->add_option("--port", config.port, "Port (0 picks a free one)")
      ->capture_default_str();
  serve_cmd->add_option("--host", config.host, "Interface to bind")
      ->capture_default_str();
  serve_cmd->add_option("--state", config.state, "Dashboard state to restore");
  serve_cmd->add_option("--ui-dir", config.ui_dir,
                        "Directory with the built dashboard");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* sub = explain_cmd->parsed() ? explain_cmd
                    : serve_cmd->parsed() ? serve_cmd
                                          : &app;
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (explain_cmd->parsed()) return explain(config, out, err);
    return serve(config, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << explain_cmd->help();
    return kExitUsage;
  } catch (const InvalidParameters& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << e.kind() << "): " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace exposition
