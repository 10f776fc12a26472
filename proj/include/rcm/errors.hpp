// Copyright 2026 The rcm Authors
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

namespace rcm {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments, malformed literals or config files, unknown labels.
class UsageError : public Error {
   public:
    using Error::Error;
};

/// A numerical routine failed or produced a value outside its valid range.
class NumericalError : public Error {
   public:
    using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
   public:
    using Error::Error;
};

}  // namespace rcm
