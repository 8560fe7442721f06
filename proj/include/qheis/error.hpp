#pragma once

#include <stdexcept>
#include <string>

namespace qheis {

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

class ZeroDenominator : public Error
{
public:
	ZeroDenominator() : Error("zero denominator") {}
};

/// Evaluation of a Scalar at a point where its denominator vanishes.
class EvaluationError : public Error
{
public:
	using Error::Error;
};

class DomainError : public Error
{
public:
	using Error::Error;
};

/// Mixing series with different expansion directions, or windows that do not fit.
class SeriesError : public Error
{
public:
	using Error::Error;
};

/// Syntax or shape error in the kernel micro-grammar. `position` is a 0-based
/// character offset into the parsed text (npos when not applicable).
class ParseError : public Error
{
public:
	ParseError(std::string const &what, std::size_t position = std::string::npos)
	    : Error(what), position_(position)
	{
	}
	std::size_t position() const { return position_; }

private:
	std::size_t position_;
};

/// A computation that would need an operator pair or multiplier outside the catalog.
class UnsupportedError : public Error
{
public:
	using Error::Error;
};

} // namespace qheis
