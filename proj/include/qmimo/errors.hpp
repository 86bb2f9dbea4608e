// SPDX-License-Identifier: Apache-2.0
//
// qmimo: energy-efficient precoding for quantized massive MIMO downlink
// Copyright (C) 2026 The qmimo authors
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
#ifndef qmimo_errors_H
#define qmimo_errors_H

#include <stdexcept>
#include <string>

namespace qmimo
{

// Violated input contract (infeasible precoder, non-unit direction, bad dimensions).
class PreconditionError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure inside an iterative solver. `where()` names the loop
// coordinates, e.g. "outer=3 middle=2 gpi=7".
class SolverError : public std::runtime_error
{
public:
    SolverError(const std::string &what, std::string where, int iteration = -1)
        : std::runtime_error(what + (where.empty() ? "" : " [" + where + "]")),
          where_(std::move(where)), iteration_(iteration) {}

    const std::string &where() const noexcept { return where_; }
    int iteration() const noexcept { return iteration_; }

private:
    std::string where_;
    int iteration_;
};

} // namespace qmimo

#endif
