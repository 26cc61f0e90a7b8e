// Copyright 2026 The qauction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAUCTION_CONFIG_HPP_
#define QAUCTION_CONFIG_HPP_

#include "json.hpp"

#include <string>
#include <string_view>
#include <vector>

#include "qauction/runner.hpp"

namespace qauction {

using Json = nlohmann::ordered_json;

// Parses a configuration document. Comments are allowed; unknown keys are
// rejected with kInvalidConfig.
ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig ConfigFromJson(const Json& doc);
ExperimentConfig LoadConfigFile(const std::string& path);

// Full document with every field spelled out; ConfigFromJson inverts it.
Json ConfigToJson(const ExperimentConfig& config);

// Applies "dotted.path=value" to a document. The value is read as JSON when
// it parses, otherwise as a string.
void ApplyOverride(Json& doc, std::string_view assignment);

// Presets compiled into the library from presets/*.json.
std::vector<std::string> PresetNames();
std::string_view PresetText(std::string_view name);
Json PresetDocument(std::string_view name);
ExperimentConfig LoadPreset(std::string_view name);

}  // namespace qauction

#endif  // QAUCTION_CONFIG_HPP_
