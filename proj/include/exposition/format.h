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

#ifndef EXPOSITION_FORMAT_H_
#define EXPOSITION_FORMAT_H_

#include <string>

namespace exposition {

// Shortest decimal string that parses back to `value`.
std::string format_shortest(double value);

// Fixed 17 significant digits ("%.17g"). Used on the external predictor wire.
std::string format_wire(double value);

}  // namespace exposition

#endif  // EXPOSITION_FORMAT_H_
