#pragma once

#include <stdexcept>
#include <string>

namespace molstore {

// Base class for all simulator errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sequence text that cannot be decoded (bad symbol, length not a multiple of 4).
class MalformedSequenceError : public Error {
public:
    using Error::Error;
};

// Layout violates a structural constraint (non power-of-two spot count, spots
// exceeding the chip area).
class InvalidLayoutError : public Error {
public:
    using Error::Error;
};

// Spot address outside the layout.
class AddressingError : public Error {
public:
    using Error::Error;
};

// Bad or missing configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Parameter outside its physical domain (negative power, zero field).
class DomainError : public Error {
public:
    using Error::Error;
};

// Overlapping translocation events handed to the synthesizer.
class SchedulingError : public Error {
public:
    using Error::Error;
};

// Detector cannot estimate an open-pore baseline.
class BaselineError : public Error {
public:
    using Error::Error;
};

// Illegal action for the current write-station state.
class ProtocolViolation : public Error {
public:
    using Error::Error;
};

// Activator spot would co-expose neighboring sites.
class AdjacencyError : public Error {
public:
    using Error::Error;
};

// Operation requires a capability the medium does not have (e.g. reversing a
// write-once strand).
class CapabilityError : public Error {
public:
    using Error::Error;
};

} // namespace molstore
