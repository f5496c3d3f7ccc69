/*
 Copyright 2026 The varlift Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <string>

#include "json.hpp"

namespace varlift::cli {

/// Serializes with every floating-point number printed to 17 significant
/// digits; non-finite values become null. Output is deterministic for a
/// given value (object keys are sorted).
std::string dump_json(const nlohmann::json& j, int indent = 2);

}  // namespace varlift::cli
