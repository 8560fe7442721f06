#pragma once

#include "qheis/scalar.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qheis {

enum class Status
{
	pass,
	fail,
	inconclusive,
	error
};

std::string to_string(Status s);

struct Failure
{
	std::string tuple; // coefficient location, e.g. "x1^-3 x2^3" or "m=2 n=-2 w=1"
	Scalar expected;
	Scalar got;
};

/// Outcome of a comparison or law verification.
///
/// Invariant: status == pass exactly when failures is empty and the checked
/// sub-window is nonempty; finish() establishes it.
struct Report
{
	std::string suite;
	std::map<std::string, std::string> params;
	std::string window;       // the sub-window actually checked
	bool window_empty = false;
	Status status = Status::pass;
	std::vector<Failure> failures;
	std::uint64_t seed = 0;
	double elapsed_ms = 0;
	std::string message; // for error / inconclusive statuses
	std::size_t checked = 0; // number of coefficients compared

	/// Values the law computed, in deterministic order; used for the
	/// symbolic-vs-rational cross check.
	std::vector<std::pair<std::string, Scalar>> digest;

	void fail(std::string tuple, Scalar expected, Scalar got);
	/// Compare and record (got also goes to the digest); returns true on equality.
	bool expect_equal(std::string const &tuple, Scalar const &expected, Scalar const &got);
	/// Merge a sub-report: failures, counts and digest carry over.
	void absorb(Report const &sub, std::string const &prefix = {});
	/// Settle the status from failures / window (unless already error).
	Report &finish();

	bool passed() const { return status == Status::pass; }
};

} // namespace qheis
