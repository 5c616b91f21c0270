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

#ifndef EXPOSITION_PARALLEL_H_
#define EXPOSITION_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace exposition {

// Worker count: hardware concurrency, capped by EXPOSITION_THREADS when set.
std::size_t worker_count();

// Runs body(i) for i in [0, n). Each index is run exactly once; callers write
// results by index so output never depends on scheduling. The first exception
// thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace exposition

#endif  // EXPOSITION_PARALLEL_H_
