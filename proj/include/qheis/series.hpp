#pragma once

// Truncated formal distributions in up to three variables.
//
// A TruncatedLaurent stores exact coefficients together with, per variable,
// the exponent interval [lo, hi] on which coefficients are known and the
// interval [slo, shi] outside of which coefficients are known to vanish.
// Either end may be infinite. Unstored exponents inside the known region are
// zero. A coefficient is known when its exponent lies in the known box, or
// when any single coordinate lies outside the support interval.

#include "qheis/report.hpp"
#include "qheis/scalar.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qheis {

inline constexpr int kMaxVars = 3;
inline constexpr long kInf = 1L << 40;

using Exponent = std::array<int, kMaxVars>;

/// Inclusive integer box over an ordered list of distinct variables.
/// Bounds may be +-kInf.
struct Window
{
	std::vector<std::string> vars;
	std::vector<long> lo, hi;

	Window() = default;
	Window(std::vector<std::string> vars, std::vector<long> lo, std::vector<long> hi);
	static Window symmetric(std::vector<std::string> vars, long n);

	std::size_t size() const { return vars.size(); }
	int index(std::string const &v) const;
	bool empty() const;
	std::string to_string() const;
};

struct Direction
{
	enum class Kind
	{
		polynomial,
		iota,
		distribution
	};
	Kind kind = Kind::polynomial;
	/// For iota: variables outermost first; the last one is the series variable.
	std::vector<std::string> order;

	static Direction polynomial() { return {}; }
	static Direction iota(std::vector<std::string> order) { return {Kind::iota, std::move(order)}; }
	static Direction distribution() { return {Kind::distribution, {}}; }

	std::string to_string() const;
	friend bool operator==(Direction const &a, Direction const &b) { return a.kind == b.kind && a.order == b.order; }
};

/// Result direction of combining two series; throws SeriesError on a mismatch.
Direction combine(Direction const &a, Direction const &b);

struct VarRange
{
	long lo = -kInf, hi = kInf;   // known
	long slo = -kInf, shi = kInf; // support
	void normalize();
	bool complete() const { return lo == -kInf && hi == kInf; }
};

/// Known range of the exponent sum e = a + b given the ranges of a and b.
/// Throws SeriesError when the sum would be infinite.
VarRange convolve(VarRange const &a, VarRange const &b);

class TruncatedLaurent
{
public:
	using Terms = std::map<Exponent, Scalar>;

	TruncatedLaurent() = default;
	/// Exactly zero, all coefficients known.
	explicit TruncatedLaurent(std::vector<std::string> vars, Direction dir = Direction::polynomial());
	/// General constructor. Terms outside the known box are dropped; terms
	/// outside the support raise SeriesError.
	TruncatedLaurent(std::vector<std::string> vars, Direction dir, std::vector<VarRange> ranges, Terms terms);

	static TruncatedLaurent constant(Scalar c);
	/// Exact polynomial (finite support, everything known).
	static TruncatedLaurent polynomial(std::vector<std::string> vars, Terms terms);
	static TruncatedLaurent monomial(std::vector<std::string> vars, Exponent e, Scalar c = Scalar(1));
	/// e^{k v} through v^order.
	static TruncatedLaurent exp(std::string const &var, Scalar k, int order);

	std::vector<std::string> const &vars() const { return vars_; }
	std::size_t nvars() const { return vars_.size(); }
	int index(std::string const &v) const;
	Direction const &direction() const { return dir_; }
	VarRange const &range(std::size_t i) const { return ranges_[i]; }
	VarRange const &range(std::string const &v) const;
	Terms const &terms() const { return terms_; }
	Window known_window() const;

	bool is_known(Exponent const &e) const;
	/// Throws SeriesError if e is not known.
	Scalar coeff(Exponent const &e) const;
	Scalar coeff(std::vector<int> const &e) const;

	TruncatedLaurent operator-() const;
	TruncatedLaurent &operator*=(Scalar const &c);
	friend TruncatedLaurent operator+(TruncatedLaurent const &a, TruncatedLaurent const &b);
	friend TruncatedLaurent operator-(TruncatedLaurent const &a, TruncatedLaurent const &b);
	friend TruncatedLaurent operator*(TruncatedLaurent const &a, TruncatedLaurent const &b);
	friend TruncatedLaurent operator*(TruncatedLaurent a, Scalar const &c) { return a *= c; }
	friend TruncatedLaurent operator*(Scalar const &c, TruncatedLaurent a) { return a *= c; }
	TruncatedLaurent pow(int k) const;

	/// Embed into a variable list containing all current variables.
	TruncatedLaurent with_vars(std::vector<std::string> const &vars) const;
	/// Multiply by the monomial with exponent e (in this series' variables).
	TruncatedLaurent shifted(Exponent const &e) const;
	/// Shrink the known box to w (variables of w absent here are ignored).
	TruncatedLaurent restricted(Window const &w) const;
	/// Forget the expansion direction.
	TruncatedLaurent as_distribution() const;
	TruncatedLaurent retagged(Direction d) const;
	TruncatedLaurent specialize(RationalPoint const &p) const;

	/// Coefficient of v^k as a series in the remaining variables.
	TruncatedLaurent slice(std::string const &v, int k) const;
	TruncatedLaurent residue(std::string const &v) const { return slice(v, -1); }
	TruncatedLaurent derivative(std::string const &v) const;
	/// Rename a variable.
	TruncatedLaurent renamed(std::string const &from, std::string const &to) const;

	/// Substitute from -> base * e^{zvar}; exact through zvar^z_order.
	TruncatedLaurent subst_exp(std::string const &from, std::string const &base, std::string const &zvar, int z_order) const;

	bool is_zero() const { return terms_.empty(); }
	std::string format_exponent(Exponent const &e) const;
	std::string to_string() const;

private:
	void normalize();

	std::vector<std::string> vars_;
	Direction dir_;
	std::vector<VarRange> ranges_;
	Terms terms_;
};

/// Inverse of a one-variable series with a nonzero leading coefficient.
/// When the input is exact (infinite known window) the result is computed
/// through exponent up_to, which is then required.
TruncatedLaurent series_inverse(TruncatedLaurent const &s, std::optional<long> up_to = std::nullopt);

enum class DeltaKind
{
	plain,  // sum_k c^k x2^k x1^-k
	euler,  // sum_k k c^k x2^k x1^-k
	dshift  // sum_k k c^{k-1} x2^{k-1} x1^{-k-1}
};

/// Delta family on the box w; w.vars = {x1-role, x2-role}.
TruncatedLaurent delta_family(DeltaKind kind, Scalar const &c, Window const &w);

/// Compare a and b coefficientwise on w intersected with both known boxes.
/// The report records the sub-window actually checked.
Report assert_equal_on(TruncatedLaurent const &a, TruncatedLaurent const &b, Window const &w);

} // namespace qheis
