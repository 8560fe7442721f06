#pragma once

// Vacuum (Fock) modules of the catalog algebras in the PBW basis, and the
// polynomial-differential module of the graded algebra.
//
// Convention: creation modes are m <= -1 for every algebra; modes >= 0 kill
// the vacuum, except that on Hq / HtildeQ the central mode 0 acts by a fixed
// scalar (default 0).

#include "qheis/liealg.hpp"
#include "qheis/report.hpp"
#include "qheis/scalar.hpp"
#include "qheis/series.hpp"

#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace qheis {

/// One creation generator inside a PBW monomial. Ordered by mode, then shift.
struct Letter
{
	int mode = -1;
	int shift = 0;
	friend auto operator<=>(Letter const &, Letter const &) = default;
};

/// Sorted product of creation letters applied to the vacuum.
using PBWMonomial = std::vector<Letter>;

struct FockModule
{
	AlgebraSpec alg;
	Scalar level = Scalar::level();
	Scalar zero_mode; // scalar action of b_0 on Hq / HtildeQ

	explicit FockModule(AlgebraSpec a, Scalar l = Scalar::level(), Scalar z = Scalar())
		: alg(std::move(a)), level(std::move(l)), zero_mode(std::move(z))
	{
	}

	AlgebraTag tag() const { return alg.tag(); }
	/// b_0 is central on Hq / HtildeQ and acts by zero_mode.
	bool scalar_mode(int mode) const;
	/// The only annihilator mode that pairs with the creation mode n (n <= -1).
	int partner(int n) const;
};

using ModulePtr = std::shared_ptr<FockModule const>;

ModulePtr make_module(AlgebraTag tag, Scalar level = Scalar::level(), Scalar zero_mode = Scalar());
ModulePtr make_module(AlgebraSpec alg, Scalar level = Scalar::level(), Scalar zero_mode = Scalar());

class FockVector
{
public:
	using Terms = std::map<PBWMonomial, Scalar>;

	explicit FockVector(ModulePtr m) : mod_(std::move(m)) {}
	FockVector(ModulePtr m, Terms t);

	static FockVector vacuum(ModulePtr m);
	static FockVector basis(ModulePtr m, PBWMonomial mono);

	ModulePtr const &module() const { return mod_; }
	Terms const &terms() const { return t_; }
	Scalar coeff(PBWMonomial const &mono) const;
	bool is_zero() const { return t_.empty(); }
	/// Largest total degree sum(-mode) among the terms; -1 for zero.
	int degree() const;

	FockVector &operator+=(FockVector const &o);
	FockVector &operator-=(FockVector const &o);
	friend FockVector operator+(FockVector a, FockVector const &b) { return a += b; }
	friend FockVector operator-(FockVector a, FockVector const &b) { return a -= b; }
	friend FockVector operator*(Scalar const &c, FockVector v);
	friend bool operator==(FockVector const &a, FockVector const &b) { return a.t_ == b.t_; }

	/// Coefficient pairing in the PBW basis.
	Scalar pair(FockVector const &o) const;
	FockVector specialize(RationalPoint const &p) const;

	/// e.g. "l*b(0)_-1 b(1)_-2|0> + 3|0>"; the zero vector prints as "0".
	std::string to_string() const;

private:
	void add(PBWMonomial const &m, Scalar const &c);
	ModulePtr mod_;
	Terms t_;
};

std::string to_string(PBWMonomial const &m, AlgebraTag tag);

/// Parse "1", "|0>", or a product of generators like "b(0)_-1 b(1)_-2" applied
/// to the vacuum (any order, any modes; the result is normal ordered).
FockVector parse_state(ModulePtr m, std::string const &text);

/// g . v in canonical PBW form. Throws DomainError across algebras.
FockVector apply_generator(Generator const &g, FockVector const &v);
/// word[0] word[1] ... word[k-1] . v (rightmost acts first).
FockVector apply_word(std::vector<Generator> const &word, FockVector const &v);

/// Normal order word . vacuum by repeatedly swapping a randomly chosen
/// adjacent out-of-order pair; independent of apply_generator.
FockVector normal_order(ModulePtr m, std::vector<Generator> const &word, std::mt19937_64 &rng);

/// Smallest N >= 0 such that every annihilator mode m >= N (any shift) kills v.
int annihilation_bound(FockVector const &v);

/// One generating function in a matrix element:
///   offset 0: b(scale x) = sum_m b_m (scale x)^-m
///   offset 1: b^(shift)(scale x) = sum_m b^(shift)_m (scale x)^{-m-1}
struct FieldSpec
{
	int shift = 0;
	Scalar scale = Scalar(1);
};

/// <bra, F_1(x_1) ... F_k(x_k) ket> on the window (k <= 3, variables from w).
/// Each coefficient is one finite operator word, hence exact; the result is
/// tagged as the expansion with |x_1| > ... > |x_k|.
TruncatedLaurent two_point(FockVector const &bra, std::vector<FieldSpec> const &fields, FockVector const &ket, Window const &w);

// ---- polynomial realization of the graded algebra -------------------------

/// The variable x_n^(r).
struct PolyVar
{
	int shift = 0;
	int n = 1;
	friend auto operator<=>(PolyVar const &, PolyVar const &) = default;
};

class PolyState
{
public:
	using Monomial = std::map<PolyVar, int>;
	using Terms = std::map<Monomial, Scalar>;

	PolyState() = default;
	explicit PolyState(Terms t);
	static PolyState constant(Scalar c);
	static PolyState variable(int shift, int n);

	Terms const &terms() const { return t_; }
	bool is_zero() const { return t_.empty(); }
	/// Total degree (every variable has degree 1); -1 for zero.
	int degree() const;
	/// Coefficient of the empty monomial.
	Scalar constant_term() const;
	bool depends_on(PolyVar v) const;

	PolyState derivative(PolyVar v) const;
	PolyState &operator+=(PolyState const &o);
	PolyState &operator-=(PolyState const &o);
	friend PolyState operator+(PolyState a, PolyState const &b) { return a += b; }
	friend PolyState operator-(PolyState a, PolyState const &b) { return a -= b; }
	friend PolyState operator*(PolyState const &a, PolyState const &b);
	friend PolyState operator*(Scalar const &c, PolyState const &p);
	friend bool operator==(PolyState const &a, PolyState const &b) { return a.t_ == b.t_; }

	/// e.g. "3*x1(0)^2*x2(-1) + l"
	std::string to_string() const;

private:
	void add(Monomial const &m, Scalar const &c);
	Terms t_;
};

/// Action of the mode m generator with shift r:
///   m < 0: multiply by x_{-m}^(r);  m = 0: zero;
///   m > 0: l m (d/dx_m^(r) - d/dx_m^(r-1)).
PolyState poly_apply(int r, int m, PolyState const &p, Scalar const &level);

struct Reduction
{
	std::vector<std::pair<int, int>> trace; // (shift r, mode n) in order of application
	Scalar value;
};

/// Drive p to a nonzero multiple of 1 by annihilators, each step taking the
/// smallest shift present (so the lower-shift derivative drops out).
/// Throws DomainError for p = 0 or level 0.
Reduction reduce_to_vacuum(PolyState const &p, Scalar const &level);

/// [poly_apply(r,m), poly_apply(s,n)] p == graded constant * level * p on each sample.
Report realization_bracket_check(int r, int s, int m, int n, std::vector<PolyState> const &samples, Scalar const &level);

/// Random polynomial with small integer coefficients, degree <= max_degree,
/// shifts in [shifts.lo, shifts.hi], indices n in [1, max_n].
PolyState random_poly(std::mt19937_64 &rng, int max_degree, IndexRange shifts, int max_n);

} // namespace qheis
