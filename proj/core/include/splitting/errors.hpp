#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splitting {

// Every failure mode the library reports. All derive from Error so callers can
// catch broadly; the CLI maps a few of them to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotConsistent : public Error {
public:
    NotConsistent() : Error("scheme is not consistent: sum(a) and sum(b) must both equal 1") {}
};

class ValidationFailed : public Error {
public:
    ValidationFailed(std::string id, std::string condition, std::string detail = {})
        : Error("validation failed for '" + id + "' at condition " + condition +
                (detail.empty() ? std::string{} : ": " + detail)),
          id_(std::move(id)), condition_(std::move(condition)) {}
    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] const std::string& condition() const noexcept { return condition_; }

private:
    std::string id_;
    std::string condition_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class PartMismatch : public Error {
public:
    using Error::Error;
};

class ComplexOnRealState : public Error {
public:
    ComplexOnRealState() : Error("complex scheme applied to a problem whose flows are real-only") {}
};

class NumericalBlowup : public Error {
public:
    explicit NumericalBlowup(std::size_t step)
        : Error("state norm exceeded the overflow guard at step " + std::to_string(step)), step_(step) {}
    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class DuplicateK : public Error {
public:
    explicit DuplicateK(int k) : Error("duplicate substep count k=" + std::to_string(k)) {}
};

class SingularResolvent : public Error {
public:
    using Error::Error;
};

class GridNotPowerOfTwo : public Error {
public:
    explicit GridNotPowerOfTwo(std::size_t m)
        : Error("grid size " + std::to_string(m) + " is not a power of two") {}
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ResonanceError : public Error {
public:
    explicit ResonanceError(int k)
        : Error("resonant step size for Fourier index " + std::to_string(k)), k_(k) {}
    [[nodiscard]] int index() const noexcept { return k_; }

private:
    int k_;
};

class ZeroTrace : public Error {
public:
    ZeroTrace() : Error("trace of the reference matrix vanishes; E2 undefined") {}
};

class UnknownPreset : public Error {
public:
    explicit UnknownPreset(const std::string& name) : Error("unknown preset '" + name + "'") {}
};

class UnknownScheme : public Error {
public:
    explicit UnknownScheme(const std::string& id) : Error("unknown scheme '" + id + "'") {}
};

} // namespace splitting
