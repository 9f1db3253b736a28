// Copyright 2026 The Fieldplay Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FIELDPLAY_COMMON_H_
#define FIELDPLAY_COMMON_H_

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fieldplay {

namespace internal {

template <typename... Args>
std::string StrCat(const Args&... args) {
  std::ostringstream oss;
  (oss << ... << args);
  return oss.str();
}

}  // namespace internal

// Contract violations on caller-supplied data.
#define FIELDPLAY_CHECK_ARG(cond, ...)                                     \
  do {                                                                     \
    if (!(cond)) {                                                         \
      throw std::invalid_argument(                                         \
          ::fieldplay::internal::StrCat("fieldplay: ", __VA_ARGS__));      \
    }                                                                      \
  } while (false)

// Internal invariants; a failure here is a bug, not bad input.
#define FIELDPLAY_CHECK(cond, ...)                                         \
  do {                                                                     \
    if (!(cond)) {                                                         \
      throw std::logic_error(::fieldplay::internal::StrCat(                \
          "fieldplay internal: ", __VA_ARGS__, " (", __FILE__, ":",        \
          __LINE__, ")"));                                                 \
    }                                                                      \
  } while (false)

inline bool IsFinite(double x) { return std::isfinite(x); }

}  // namespace fieldplay

#endif  // FIELDPLAY_COMMON_H_
