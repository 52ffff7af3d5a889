// Copyright (c) 2026 The sen3d Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sen {

/// Base for every error raised by the library. The CLI maps subclasses to
/// exit codes, so new error kinds should derive from one of these.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument or precondition violation (bad counts, out-of-range labels, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Tensor shapes do not satisfy an op's shape rule.
class ShapeError : public InvalidArgument {
public:
    ShapeError(std::string op, std::vector<std::size_t> lhs, std::vector<std::size_t> rhs,
               const std::string& detail = {});

    const std::string& op() const { return op_; }
    const std::vector<std::size_t>& lhs() const { return lhs_; }
    const std::vector<std::size_t>& rhs() const { return rhs_; }

private:
    std::string op_;
    std::vector<std::size_t> lhs_;
    std::vector<std::size_t> rhs_;
};

/// Malformed, truncated or mismatched on-disk data.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Non-finite values during training or a failed numerical check.
class NumericError : public Error {
public:
    using Error::Error;
};

std::string shape_to_string(const std::vector<std::size_t>& shape);

}  // namespace sen
