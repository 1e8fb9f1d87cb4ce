#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latrefine {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A coordinate triple that is not a node of the requested lattice.
class LatticeError : public Error {
public:
    using Error::Error;
};

/// Inputs violate an operation's preconditions (length mismatch, n too small, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

class StructureError : public Error {
public:
    using Error::Error;
};

class ChainBreakError : public StructureError {
public:
    ChainBreakError(const std::string& what, std::size_t index)
        : StructureError(what), index_(index) {}
    /// Zero-based index of the first residue after the gap.
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Lattice model is not a self-avoiding walk.
class InvalidModelError : public Error {
public:
    InvalidModelError(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

class BeamExhaustedError : public Error {
public:
    BeamExhaustedError(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}
    /// Residue index no beam entry could be extended to.
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

class InstanceTooLargeError : public Error {
public:
    InstanceTooLargeError(const std::string& what, double estimate)
        : Error(what), estimate_(estimate) {}
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

}  // namespace latrefine
