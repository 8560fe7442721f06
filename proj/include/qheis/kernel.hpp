#pragma once

// Rational kernels: N * prod (1 + c*mu)^-k, with N a Laurent polynomial in the
// formal variables (and exponentials e^v), and each denominator factor a
// binomial whose monomial ratio mu is one of x_i, x_i/x_j or e^v.
// Anything else in a denominator is rejected as a shape error.
//
// Text grammar:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' ['-'|'+'] integer)?
//   atom   := integer | 'q' | 'l' | var | 'e^' var | 'e^(' var ')' | '(' expr ')'
//   var    := 'x' | 'x0' | 'x1' | 'x2' | 'z'

#include "qheis/scalar.hpp"
#include "qheis/series.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace qheis {

inline constexpr int kKernelVars = 5;
/// The formal variables the grammar knows, in canonical order.
std::array<std::string, kKernelVars> const &kernel_var_names();

struct KMono
{
	std::array<int, kKernelVars> pow{};  // powers of the variables
	std::array<int, kKernelVars> epow{}; // powers of e^v
	bool is_one() const;
	friend auto operator<=>(KMono const &, KMono const &) = default;
};

using KPoly = std::map<KMono, Scalar>;

/// Denominator factor 1 + c*mu, mu oriented canonically.
struct Binomial
{
	KMono mu;
	Scalar c;
	friend bool operator<(Binomial const &a, Binomial const &b);
	friend bool operator==(Binomial const &a, Binomial const &b) { return a.mu == b.mu && a.c == b.c; }
};

class RationalKernel
{
public:
	RationalKernel() = default;
	static RationalKernel parse(std::string const &text);
	static RationalKernel constant(Scalar c);
	static RationalKernel from_poly(KPoly n);

	KPoly const &numerator() const { return num_; }
	/// Denominator factors with positive multiplicities.
	std::map<Binomial, int> const &denominator() const { return den_; }
	/// Variables that occur, in canonical order.
	std::vector<std::string> variables() const;

	std::string to_string() const;
	friend bool operator==(RationalKernel const &a, RationalKernel const &b) { return a.num_ == b.num_ && a.den_ == b.den_; }

	/// Expansion in which the last variable of `direction` is the series
	/// variable and earlier ones are progressively outer Laurent variables.
	/// Exact on w; w names the variables of the result.
	TruncatedLaurent iota_expand(std::vector<std::string> const &direction, Window const &w) const;

private:
	friend class KernelParser;
	KPoly num_;
	std::map<Binomial, int> den_;
};

/// Parse-and-expand convenience.
TruncatedLaurent iota_expand(std::string const &kernel, std::vector<std::string> const &direction, Window const &w);

} // namespace qheis
