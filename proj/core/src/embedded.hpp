//
// Copyright 2026 The trustml Authors
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
//

#pragma once

#include <string_view>

// Bundled copies of the core/data files, embedded at configure time so
// the library and CLI work without an install prefix. The files remain
// the source of truth.
namespace trustml::embedded {

std::string_view fuzzy_rules_text();
std::string_view triage_strings_text();
std::string_view dengue_tree_text();
std::string_view pdna_model_text();

}  // namespace trustml::embedded
