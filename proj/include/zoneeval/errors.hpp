// Copyright 2026 The zone-eval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace zoneeval {

// Malformed or inconsistent input (files, flags, specs).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A metric that has no defined value for the given input, e.g. AP over a
// dataset without any ground truth.
class UndefinedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zoneeval
