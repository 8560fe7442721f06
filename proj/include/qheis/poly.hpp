#pragma once

// Dense integer polynomials in q (UPoly) and in (q, l) viewed as Z[q][l] (BiPoly),
// with content/primitive-part gcd. Building blocks for Scalar.

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

namespace qheis {

class UPoly
{
public:
	UPoly() = default;
	UPoly(long c);
	UPoly(mpz_class c);
	explicit UPoly(std::vector<mpz_class> coeffs);

	static UPoly monomial(mpz_class c, int degree);

	bool is_zero() const { return c_.empty(); }
	bool is_constant() const { return c_.size() <= 1; }
	int degree() const { return static_cast<int>(c_.size()) - 1; }
	mpz_class const &lc() const { return c_.back(); }
	mpz_class coeff(int i) const;
	std::vector<mpz_class> const &coeffs() const { return c_; }

	UPoly &operator+=(UPoly const &o);
	UPoly &operator-=(UPoly const &o);
	UPoly &operator*=(mpz_class const &s);
	UPoly operator-() const;
	friend UPoly operator+(UPoly a, UPoly const &b) { return a += b; }
	friend UPoly operator-(UPoly a, UPoly const &b) { return a -= b; }
	friend UPoly operator*(UPoly const &a, UPoly const &b);
	friend UPoly operator*(UPoly a, mpz_class const &s) { return a *= s; }
	friend bool operator==(UPoly const &a, UPoly const &b) { return a.c_ == b.c_; }

	/// gcd of the integer coefficients, nonnegative; 0 for the zero polynomial.
	mpz_class content() const;
	UPoly divexact(mpz_class const &s) const;
	UPoly shifted(int k) const; // multiply by q^k, k >= 0

	mpq_class eval(mpq_class const &x) const;

private:
	void trim();
	std::vector<mpz_class> c_;
};

/// Exact quotient a/b in Z[q]; throws if b does not divide a.
UPoly divexact(UPoly const &a, UPoly const &b);
/// Pseudo-remainder of a by b.
UPoly prem(UPoly a, UPoly const &b);
/// gcd in Z[q] with positive leading coefficient.
UPoly gcd(UPoly const &a, UPoly const &b);

class BiPoly
{
public:
	BiPoly() = default;
	BiPoly(long c) : BiPoly(UPoly(c)) {}
	BiPoly(UPoly c);
	explicit BiPoly(std::vector<UPoly> terms);

	static BiPoly q();
	static BiPoly level();

	bool is_zero() const { return t_.empty(); }
	bool is_constant() const { return t_.size() <= 1 && (t_.empty() || t_[0].is_constant()); }
	int degree() const { return static_cast<int>(t_.size()) - 1; } // degree in l
	UPoly const &lc() const { return t_.back(); }
	UPoly coeff(int j) const;
	std::vector<UPoly> const &terms() const { return t_; }
	/// Sign of the leading integer coefficient under lex order (l first, then q).
	int sign() const;

	BiPoly &operator+=(BiPoly const &o);
	BiPoly &operator-=(BiPoly const &o);
	BiPoly operator-() const;
	friend BiPoly operator+(BiPoly a, BiPoly const &b) { return a += b; }
	friend BiPoly operator-(BiPoly a, BiPoly const &b) { return a -= b; }
	friend BiPoly operator*(BiPoly const &a, BiPoly const &b);
	friend BiPoly operator*(BiPoly const &a, UPoly const &b);
	friend bool operator==(BiPoly const &a, BiPoly const &b) { return a.t_ == b.t_; }

	/// gcd of the Z[q] coefficients.
	UPoly content() const;
	BiPoly divexact(UPoly const &s) const;
	BiPoly shifted(int k) const; // multiply by l^k

	mpq_class eval(mpq_class const &q, mpq_class const &l) const;
	std::size_t hash() const;

	std::string to_string() const;

private:
	void trim();
	std::vector<UPoly> t_;
};

BiPoly divexact(BiPoly const &a, BiPoly const &b);
BiPoly gcd(BiPoly const &a, BiPoly const &b);

} // namespace qheis
