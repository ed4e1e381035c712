// Copyright 2026 The pbit-nqs developers
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pbitnqs {

// Base class for library errors. API misuse (bad index, shape mismatch on an
// internal call) throws std::invalid_argument / std::out_of_range instead.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user-supplied configuration: unknown keys, invalid values, violated
// capacity bounds. Maps to exit code 1 in the CLI.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Runtime numeric failure: non-finite estimates, eigensolver non-convergence.
// Maps to exit code 2.
class NumericError : public Error {
public:
    using Error::Error;
};

// File read/write or file format failure. Maps to exit code 2.
class IoError : public Error {
public:
    using Error::Error;
};

// Wire-protocol or transport failure. Carries the protocol error code that was
// sent or received. Maps to exit code 3.
class ProtocolError : public Error {
public:
    ProtocolError(uint16_t code, const std::string& what) : Error(what), code_(code) {}
    uint16_t code() const noexcept { return code_; }

private:
    uint16_t code_;
};

}  // namespace pbitnqs
