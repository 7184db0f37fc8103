// SPDX-License-Identifier: Apache-2.0
//
// risloc: RIS-assisted radio localization simulator and solvers
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

namespace risloc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// A direction vector of zero length (coincident points).
class DegenerateDirection : public Error
{
  public:
    DegenerateDirection() : Error("degenerate direction") {}
    explicit DegenerateDirection(const std::string& what) : Error("degenerate direction: " + what) {}
};

/// The scenario or the measurement set does not admit the requested quantity.
class Infeasible : public Error
{
  public:
    using Error::Error;
};

/// The requested unknowns are not identifiable from the available measurements.
class NonIdentifiable : public Error
{
  public:
    using Error::Error;
};

/// Malformed scenario or measurement document.
class ParseError : public Error
{
  public:
    using Error::Error;
};

}  // namespace risloc
