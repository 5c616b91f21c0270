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

// Serves a model over the line protocol used by external predictors: one
// request per line on stdin, one response per line on stdout.
//
//   exposition-model-server --model spec.json --data train.csv --target y

#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "exposition/dataset.h"
#include "exposition/error.h"
#include "exposition/external_predictor.h"
#include "exposition/reference_models.h"

int main(int argc, char** argv) {
  CLI::App app{"Line-protocol prediction server", "exposition-model-server"};
  std::string model_path, data_path, target;
  app.add_option("--model", model_path, "Model specification")->required();
  app.add_option("--data", data_path, "Training data (CSV)")->required();
  app.add_option("--target", target, "Target column")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::shared_ptr<const exposition::Predictor> model;
  std::shared_ptr<const exposition::Schema> schema;
  try {
    const auto data = exposition::load_dataset_file(data_path, target);
    model = exposition::load_model_file(model_path, data);
    schema = data.feature_schema();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::ios::sync_with_stdio(false);
  std::string line;
  while (std::getline(std::cin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto rows = exposition::decode_request(line, schema);
      std::cout << exposition::encode_response(model->predict(rows)) << "\n"
                << std::flush;
    } catch (const std::exception& e) {
      // The caller treats a closed stream as a failed call; say why first.
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}
