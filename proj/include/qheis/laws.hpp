#pragma once

// The catalog of generating-function identities, each checked exactly on a
// finite window. Laws run independently of each other and may run concurrently.

#include "qheis/report.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qheis {

struct LawConfig
{
	int window = 8;  // exponent bound
	int z_order = 6; // x0 / z truncation order
	std::uint64_t seed = 20240611;
	/// Law-specific overrides: "r", "s", "p" (multiplier text), "algebra", ...
	std::map<std::string, std::string> params;
};

/// Law ids, sorted.
std::vector<std::string> const &law_catalog();
/// One-line description of a law (empty for an unknown id).
std::string law_summary(std::string const &law);

/// Run one law. Throws DomainError for an unknown id; errors raised while
/// checking become status error in the report.
Report verify_identity(std::string const &law, LawConfig const &cfg);

} // namespace qheis
