#pragma once

// Catalog of the five Heisenberg-type Lie algebras and their structure constants.
//
// Every bracket of two generators is a multiple of the central element; the
// functions here return that multiple. Generating functions use
//   offset 0: b(x) = sum_m b_m x^-m          (Hq, HtildeQ)
//   offset 1: b(x) = sum_m b_m x^{-m-1}      (Bhat, BhatQ, GradedL)

#include "qheis/report.hpp"
#include "qheis/scalar.hpp"
#include "qheis/series.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

namespace qheis {

enum class AlgebraTag
{
	Hq,
	HtildeQ,
	Bhat,
	BhatQ,
	GradedL
};

std::string to_string(AlgebraTag t);
/// Accepts "hq", "htildeq", "bhat", "bhatq", "gradedl" (case-insensitive).
AlgebraTag parse_algebra(std::string const &name);

int mode_offset(AlgebraTag t);
bool has_shift(AlgebraTag t);

struct Generator
{
	AlgebraTag alg = AlgebraTag::Hq;
	int shift = 0;
	int mode = 0;
	bool central = false;

	static Generator c(AlgebraTag alg) { return {alg, 0, 0, true}; }
	/// "c", "b_m" or "b(r)_m".
	std::string to_string() const;
	friend auto operator<=>(Generator const &, Generator const &) = default;
};

/// Parse "b_-2", "b(1)_-2" or "c" for the given algebra.
Generator parse_generator(AlgebraTag alg, std::string const &text);

/// Pairing on the span of the b^(r): (delta_{r,s+1} - delta_{r,s-1}) / (q - q^-1).
Scalar bilinear_form(int r, int s);

/// x^j coefficient of f_n(x) = g(q^{n+1}, x) - g(q^{n-1}, x), g(a, x) = a e^x / (1 - a e^x)^2,
/// expanded at x = 0. Memoized; safe for concurrent use.
Scalar f_coefficient(int n, int j);
/// f_n through x^order.
TruncatedLaurent f_series(int n, int order);

class AlgebraSpec
{
public:
	explicit AlgebraSpec(AlgebraTag tag);

	AlgebraTag tag() const { return tag_; }
	int offset() const { return mode_offset(tag_); }

	/// Coefficient of c in [a, b]. Throws DomainError across algebras.
	Scalar bracket(Generator const &a, Generator const &b) const;
	Scalar bracket(int r, int m, int s, int n) const;

	Scalar form(int r, int s) const;
	Scalar f_coeff(int n, int j) const;

	/// Replacement f-coefficient provider (negative controls).
	AlgebraSpec with_f(std::function<Scalar(int, int)> f) const;
	/// Replacement bilinear form (negative controls).
	AlgebraSpec with_form(std::function<Scalar(int, int)> form) const;
	bool mutated() const { return bool(f_) || bool(form_); }

private:
	Scalar bhatq(int d, int m, int n) const;

	AlgebraTag tag_;
	std::function<Scalar(int, int)> f_;
	std::function<Scalar(int, int)> form_;

	struct Cache
	{
		std::mutex mu;
		std::map<std::tuple<std::string, int, int, int>, Scalar> values; // keyed by mode too
	};
	std::shared_ptr<Cache> cache_;
};

/// Structure constant of the graded algebra L, derived from BhatQ by keeping
/// the part of [b^(r)_m, b^(s)_n] that lies in filtration degree m + n.
Scalar graded_leading_constant(int r, int s, int m, int n);
/// The closed form m d_{r,s} + d_{r,s-1}(|m|-m)/2 - d_{r,s+1}(|m|+m)/2, times d_{m+n,0}.
Scalar graded_closed_form(int r, int s, int m, int n);

struct IndexRange
{
	int lo = 0, hi = 0;
};

Report check_skew_symmetry(AlgebraSpec const &alg, IndexRange r, IndexRange m);
Report verify_shift_invariance(AlgebraSpec const &alg, int k, IndexRange r, IndexRange m);
/// BhatQ brackets with both modes >= 0 vanish.
Report check_positive_abelian(AlgebraSpec const &alg, IndexRange r, IndexRange m);
Report check_graded_agreement(IndexRange r, IndexRange m);
/// Rank of the form matrix on shift indices [lo, hi].
int form_rank(int lo, int hi);

} // namespace qheis
