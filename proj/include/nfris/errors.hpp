// SPDX-License-Identifier: Apache-2.0
//
// nfris: capacity and RIS design for near-field RIS-aided MIMO links
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace nfris {

enum class ErrorKind {
    invalid_dimension,
    degenerate_geometry,
    numerical_failure,
    invalid_input,
    config,
};

inline const char *to_string(ErrorKind kind)
{
    switch (kind)
    {
    case ErrorKind::invalid_dimension:
        return "invalid_dimension";
    case ErrorKind::degenerate_geometry:
        return "degenerate_geometry";
    case ErrorKind::numerical_failure:
        return "numerical_failure";
    case ErrorKind::invalid_input:
        return "invalid_input";
    case ErrorKind::config:
        return "config";
    }
    return "unknown";
}

// All library failures are reported through this one exception type; the kind
// drives the CLI exit code.
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace nfris
