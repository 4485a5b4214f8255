#pragma once

#include <stdexcept>
#include <string>

namespace roadseg {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class EmptySelection : public Error {
public:
    explicit EmptySelection(const std::string& msg) : Error(msg) {}
};

class InsufficientPixels : public Error {
public:
    explicit InsufficientPixels(const std::string& msg) : Error(msg) {}
};

class SingularDenominator : public Error {
public:
    explicit SingularDenominator(const std::string& msg) : Error(msg) {}
};

class DegenerateObjective : public Error {
public:
    explicit DegenerateObjective(const std::string& msg) : Error(msg) {}
};

class SingularNormalMatrix : public Error {
public:
    explicit SingularNormalMatrix(const std::string& msg) : Error(msg) {}
};

class NonConvergence : public Error {
public:
    explicit NonConvergence(const std::string& msg) : Error(msg) {}
};

class DegenerateHistogram : public Error {
public:
    explicit DegenerateHistogram(const std::string& msg) : Error(msg) {}
};

class InvalidSpec : public Error {
public:
    explicit InvalidSpec(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

class EmptyMap : public Error {
public:
    explicit EmptyMap(const std::string& msg) : Error(msg) {}
};

class RangeError : public Error {
public:
    explicit RangeError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace roadseg
