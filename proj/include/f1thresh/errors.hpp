/* Copyright 2026 The f1thresh Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef F1THRESH_ERRORS_HPP_
#define F1THRESH_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace f1thresh {

// Input data failed validation: unreadable or malformed file, out-of-range
// cell, shape mismatch between paired matrices.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A quantity is undefined at the requested point, e.g. the micro-F1 gradient
// when neither the truth nor the predictions contain a positive.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A size or work budget was exceeded.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters (bad k, non-positive step, ...) are reported with
// std::invalid_argument.

}  // namespace f1thresh

#endif  // F1THRESH_ERRORS_HPP_
