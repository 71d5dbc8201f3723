/*
 * Copyright 2026 The xaieval Authors.
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

#ifndef XAIEVAL_COMMON_H_
#define XAIEVAL_COMMON_H_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace xaieval {

// Rows are samples. Row-major so that a sample is a contiguous block.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Raised for malformed inputs: bad files, schema violations, degenerate
// targets, invalid configurations.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a numerical routine cannot produce a result.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xaieval

#endif  // XAIEVAL_COMMON_H_
