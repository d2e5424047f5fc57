/*
 * Copyright 2026 The mistriage Authors.
 *
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

#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mistriage/model.hpp"

namespace mistriage {

// Binary container:
//   "MTCKPT01"                          8-byte magic + version
//   u64 metadata length, metadata JSON  (config, hashes, seed, ...)
//   u64 tensor count
//   per tensor, in ModelParams::visit order:
//     u32 name length, name, u64 rows, u64 cols, rows*cols little-endian f64
struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  // Free-form provenance; "model_config" is always rewritten from `config`.
  nlohmann::json metadata = nlohmann::json::object();

  std::string serialize() const;
  static Checkpoint parse(std::string_view bytes);
};

}  // namespace mistriage
