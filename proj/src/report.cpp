#include "qheis/report.hpp"

namespace qheis {

std::string to_string(Status s)
{
	switch (s)
	{
	case Status::pass:
		return "pass";
	case Status::fail:
		return "fail";
	case Status::inconclusive:
		return "inconclusive";
	case Status::error:
		return "error";
	}
	return "error";
}

void Report::fail(std::string tuple, Scalar expected, Scalar got)
{
	failures.push_back({std::move(tuple), std::move(expected), std::move(got)});
}

bool Report::expect_equal(std::string const &tuple, Scalar const &expected, Scalar const &got)
{
	++checked;
	digest.emplace_back(tuple, got);
	if (expected == got)
		return true;
	fail(tuple, expected, got);
	return false;
}

void Report::absorb(Report const &sub, std::string const &prefix)
{
	for (auto const &f : sub.failures)
		failures.push_back({prefix + f.tuple, f.expected, f.got});
	checked += sub.checked;
	for (auto const &[k, v] : sub.digest)
		digest.emplace_back(prefix + k, v);
	if (sub.status == Status::error && status != Status::error)
	{
		status = Status::error;
		message = prefix + sub.message;
	}
	if (sub.window_empty)
		window_empty = true;
}

Report &Report::finish()
{
	if (status == Status::error)
		return *this;
	if (!failures.empty())
		status = Status::fail;
	else if (window_empty || checked == 0)
		status = Status::inconclusive;
	else
		status = Status::pass;
	return *this;
}

} // namespace qheis
