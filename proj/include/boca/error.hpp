// Copyright 2026 The boca Authors
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

#include <sstream>
#include <stdexcept>
#include <string>

namespace boca {

/// Base class of every error raised by the library. Carries the name of the
/// operation that rejected its input and, when meaningful, the offending
/// residual.
class Error : public std::runtime_error {
public:
    Error(std::string operation, const std::string& what, double residual = -1.0)
        : std::runtime_error(format(operation, what, residual)),
          operation_(std::move(operation)),
          residual_(residual) {}

    const std::string& operation() const noexcept { return operation_; }
    double residual() const noexcept { return residual_; }

private:
    static std::string format(const std::string& op, const std::string& what, double residual) {
        std::ostringstream os;
        os << op << ": " << what;
        if (residual >= 0.0) {
            os << " (residual " << residual << ")";
        }
        return os.str();
    }

    std::string operation_;
    double residual_;
};

/// Malformed input: wrong shapes, empty lists, out-of-range indices.
class ShapeError : public Error {
    using Error::Error;
};

/// A mathematical hypothesis of a construction does not hold for the input
/// (map not completely positive, restriction not multiplicative, ...).
class HypothesisError : public Error {
    using Error::Error;
};

/// Evaluation would need tower edges beyond the depth the tower was built with.
class DepthError : public Error {
    using Error::Error;
};

/// A configured dimension cap was exceeded.
class CapacityError : public Error {
    using Error::Error;
};

/// A post-condition of a construction failed on valid input. Indicates a
/// tolerance misconfiguration or a bug.
class InternalError : public Error {
    using Error::Error;
};

} // namespace boca
