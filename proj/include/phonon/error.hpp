// Copyright 2026 The phonon-optics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace phonon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A state or operator index falls outside the retained Fock space, or two
/// objects were built on different truncations.
class TruncationError : public Error {
   public:
    using Error::Error;
};

/// A joint state lacks the qubit register an operation acts on, or the
/// register is prepared in a state the operation does not accept.
class RegisterError : public Error {
   public:
    using Error::Error;
};

/// Invalid numeric argument (zero detuning, non-positive step, ...).
class ArgumentError : public Error {
   public:
    using Error::Error;
};

}  // namespace phonon
