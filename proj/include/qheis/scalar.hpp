#pragma once

// Exact rational functions in the deformation parameter q and the level l.
//
// Canonical form: numerator and denominator are coprime in Z[q,l] (integer
// content included) and the leading coefficient of the denominator is positive,
// leading meaning highest l-degree, then highest q-degree. Equal values have
// identical representations, so == is structural.

#include "qheis/poly.hpp"

#include <gmpxx.h>

#include <iosfwd>
#include <string>

namespace qheis {

/// A point (q0, l0) with q0 not in {0, 1, -1}, the rational roots of unity.
class RationalPoint
{
public:
	RationalPoint(mpq_class q0, mpq_class l0);
	mpq_class const &q() const { return q_; }
	mpq_class const &level() const { return l_; }

private:
	mpq_class q_, l_;
};

/// While alive on a thread, Scalar::q() and Scalar::level() return the
/// constants of the point, so a whole computation runs over Q instead of Q(q,l).
class ScopedPoint
{
public:
	explicit ScopedPoint(RationalPoint const &p);
	~ScopedPoint();
	ScopedPoint(ScopedPoint const &) = delete;
	ScopedPoint &operator=(ScopedPoint const &) = delete;

private:
	RationalPoint const *prev_;
	RationalPoint point_;
};

/// The point active on this thread, or null in symbolic mode.
RationalPoint const *active_point();
/// Cache key for the active mode: "" when symbolic, "q0,l0" otherwise.
std::string mode_key();

class Scalar
{
public:
	Scalar() : num_(), den_(1) {}
	Scalar(long n) : num_(n), den_(1) {}
	Scalar(mpz_class n) : num_(UPoly(std::move(n))), den_(1) {}
	Scalar(mpq_class const &r);

	/// Canonicalize num/den. Throws ZeroDenominator for den == 0.
	static Scalar normalize(BiPoly num, BiPoly den);

	static Scalar q();
	static Scalar level();
	/// q^n for any integer n.
	static Scalar qpow(int n);

	BiPoly const &numerator() const { return num_; }
	BiPoly const &denominator() const { return den_; }

	bool is_zero() const { return num_.is_zero(); }
	bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
	/// Value as a rational number; only valid when is_constant().
	mpq_class constant_value() const;

	Scalar operator-() const;
	Scalar &operator+=(Scalar const &o);
	Scalar &operator-=(Scalar const &o);
	Scalar &operator*=(Scalar const &o);
	Scalar &operator/=(Scalar const &o);
	friend Scalar operator+(Scalar a, Scalar const &b) { return a += b; }
	friend Scalar operator-(Scalar a, Scalar const &b) { return a -= b; }
	friend Scalar operator*(Scalar a, Scalar const &b) { return a *= b; }
	friend Scalar operator/(Scalar a, Scalar const &b) { return a /= b; }
	friend bool operator==(Scalar const &a, Scalar const &b) { return a.num_ == b.num_ && a.den_ == b.den_; }
	friend bool operator!=(Scalar const &a, Scalar const &b) { return !(a == b); }

	Scalar inv() const;
	Scalar pow(int n) const;

	/// Substitute q -> q0 and l -> l0. Throws EvaluationError naming the
	/// vanishing denominator factor.
	mpq_class evaluate_at(RationalPoint const &p) const;
	/// Same substitution, result kept as a (constant) Scalar.
	Scalar specialize(RationalPoint const &p) const { return Scalar(evaluate_at(p)); }

	std::size_t hash() const { return num_.hash() * 31 + den_.hash(); }
	/// Canonical text; parseable by the kernel grammar ("l" denotes the level).
	std::string to_string() const;

private:
	BiPoly num_, den_;
};

std::ostream &operator<<(std::ostream &os, Scalar const &s);

/// q-integer [m]_q = (q^m - q^-m) / (q - q^-1), an exact Laurent polynomial in q.
Scalar qint(int m);

/// Binomial coefficient C(n, k) for any integer n and k >= 0 (generalized for n < 0).
mpz_class binomial(long n, long k);

} // namespace qheis

template <> struct std::hash<qheis::Scalar>
{
	std::size_t operator()(qheis::Scalar const &s) const noexcept { return s.hash(); }
};
