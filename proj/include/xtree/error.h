/*
 * Copyright 2026 The xtree Authors.
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

#ifndef XTREE_ERROR_H_
#define XTREE_ERROR_H_

#include <stdexcept>
#include <string>

namespace xtree {

// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A model document or in-memory tree violates a structural invariant.
class ModelError : public Error {
 public:
  ModelError(const std::string& what, int node = -1)
      : Error(node >= 0 ? what + " (node " + std::to_string(node) + ")"
                        : what),
        node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

// Bad instance, evaluation point, parameter or option.
class InputError : public Error {
 public:
  using Error::Error;
};

// A numerical guard tripped (NaN result, non-convergent iteration).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace xtree

#endif  // XTREE_ERROR_H_
