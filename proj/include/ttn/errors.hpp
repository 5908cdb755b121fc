// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ttn {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CycleDetected : public Error {
public:
    using Error::Error;
};

class Disconnected : public Error {
public:
    using Error::Error;
};

class NonPositiveDimension : public Error {
public:
    using Error::Error;
};

class DuplicateEdge : public Error {
public:
    using Error::Error;
};

class UnknownVertex : public Error {
public:
    using Error::Error;
};

class AxisMismatch : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class NonFiniteEntries : public Error {
public:
    using Error::Error;
};

class MemoryBudgetExceeded : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace ttn
