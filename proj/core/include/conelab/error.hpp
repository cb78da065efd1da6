/*
   Copyright 2026 The conelab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace conelab {

/// Input outside an operation's mathematical domain (zero vectors, violated
/// lemma hypotheses, unbounded regions where a bounded one is needed).
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// A lattice too coarse for the requested geometry.
class ResolutionError : public DomainError
{
public:
    using DomainError::DomainError;
};

/// Malformed external input (JSON, config files, CLI values).
class ParseError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Requested work exceeds a hard limit.
class BudgetError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace conelab
