#pragma once

// Operator-valued series a(x) = sum_e a_(e) x^e on a Fock module W, and the
// two products that build new series out of old ones:
//
//   ordinary:  a_n b = coefficient of z^{-n-1} in z^{-k} ((x1-x)^k a(x1) b(x))|_{x1=x+z}
//   phi:       a^e_n b = coefficient of z^{-n-1} in
//              iota_{x,z}(1/p(x e^z, x)) (p(x1,x) a(x1) b(x))|_{x1=x e^z}
//
// Operands of a product must be linear: a multiple of 1_W plus weighted
// generator fields. Their commutator is then a scalar series, which is what
// makes the truncation bound for p(x1,x) a(x1) b(x) provable (see the .cpp).

#include "qheis/fock.hpp"
#include "qheis/kernel.hpp"
#include "qheis/scalar.hpp"
#include "qheis/series.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qheis {

/// w(e) = scale^e * sum_k poly[k] e^k
struct Weight
{
	Scalar scale = Scalar(1);
	std::vector<Scalar> poly{Scalar(1)};

	Scalar at(long e) const;
	int degree() const { return static_cast<int>(poly.size()) - 1; }
	/// e -> e + k
	Weight shifted(int k) const;
	Weight times_poly(std::vector<Scalar> const &p) const;
	friend Weight operator*(Weight const &a, Weight const &b);
	friend bool operator==(Weight const &a, Weight const &b) { return a.scale == b.scale && a.poly == b.poly; }
};

/// Coefficient of x^e is weight(e) * b^(shift)_m with m = -(e + sigma) - offset.
struct LinearTerm
{
	int shift = 0;
	Weight weight;
	int sigma = 0;
};

/// Homogeneous polynomial p(x1, x2) with coefficients in Q(q, l).
class Multiplier
{
public:
	using Terms = std::map<std::pair<int, int>, Scalar>; // (x1 power, x2 power)

	Multiplier() = default;
	explicit Multiplier(Terms t);
	static Multiplier one() { return Multiplier(Terms{{{0, 0}, Scalar(1)}}); }
	/// Polynomial kernel text in x1, x2 such as "(x1 - q*x2)*(q*x1 - x2)".
	static Multiplier parse(std::string const &text);
	static Multiplier from_kernel(RationalKernel const &k);
	/// x1 - c x2
	static Multiplier linear(Scalar const &c);

	Terms const &terms() const { return t_; }
	bool is_zero() const { return t_.empty(); }
	bool homogeneous() const;
	int degree() const;
	int min_x1() const;
	int min_x2() const;
	Multiplier pow(int k) const;
	friend Multiplier operator*(Multiplier const &a, Multiplier const &b);
	friend bool operator==(Multiplier const &a, Multiplier const &b) { return a.t_ == b.t_; }
	/// p(e^z, 1) through z^order.
	TruncatedLaurent at_exp(int order) const;
	/// Order of the zero of p(x, 1) at x = 1.
	int zero_order_at_one() const;
	std::string to_string() const;

private:
	Terms t_;
};

class PairProduct;

struct ProductTerm
{
	Scalar coef = Scalar(1);
	std::shared_ptr<PairProduct const> pair;
	int n = 0;              // product index, or the z-power for numerator series
	Scalar argscale = Scalar(1); // series evaluated at argscale * x
};

enum class ProductKind
{
	ordinary,
	phi,
	numerator // (p(x1,x) a(x1) b(x))|_{x1 = x e^z}, coefficient of z^n
};

class OperatorSeries
{
public:
	explicit OperatorSeries(ModulePtr m);
	static OperatorSeries identity(ModulePtr m);

	ModulePtr const &module() const { return mod_; }
	/// 0 for b(x) = sum b_m x^-m (Hq, HtildeQ), 1 for b^(r)(x) = sum b_m x^{-m-1}.
	int offset() const;

	/// Coefficient of x^e applied to v.
	FockVector coeff(long e, FockVector const &v) const;
	/// Mode n in the field's own convention: coefficient of x^{-n-offset}.
	FockVector mode_apply(int n, FockVector const &v) const { return coeff(-static_cast<long>(n) - offset(), v); }
	/// Smallest exponent whose coefficient can act nontrivially on v.
	long lower_exponent(FockVector const &v) const;
	/// Smallest N with mode_apply(n, v) = 0 for all n >= N.
	long annihilation_bound(FockVector const &v) const { return -lower_exponent(v) - offset() + 1; }

	bool is_linear() const { return prods_.empty(); }
	bool is_zero() const { return unit_.is_zero() && lin_.empty() && prods_.empty(); }
	Scalar const &unit() const { return unit_; }
	std::vector<LinearTerm> const &linear_terms() const { return lin_; }
	std::vector<ProductTerm> const &product_terms() const { return prods_; }

	/// a(c x).
	OperatorSeries scaled(Scalar const &c) const;
	/// d/dx; linear series only.
	OperatorSeries derivative() const;

	OperatorSeries &operator+=(OperatorSeries const &o);
	friend OperatorSeries operator+(OperatorSeries a, OperatorSeries const &b) { return a += b; }
	friend OperatorSeries operator-(OperatorSeries a, OperatorSeries const &b) { return a += Scalar(-1) * b; }
	friend OperatorSeries operator*(Scalar const &c, OperatorSeries a);

	/// Human description, e.g. "b(q^1 x)" or "(b(x))^e_{-1}(b(q x))".
	std::string const &name() const { return name_; }
	OperatorSeries &named(std::string n)
	{
		name_ = std::move(n);
		return *this;
	}

	/// Internal: assemble from parts.
	OperatorSeries(ModulePtr m, Scalar unit, std::vector<LinearTerm> lin, std::vector<ProductTerm> prods, std::string name);

private:
	ModulePtr mod_;
	Scalar unit_;
	std::vector<LinearTerm> lin_;
	std::vector<ProductTerm> prods_;
	std::string name_;
};

struct FieldFamily
{
	enum class Kind
	{
		scaled, // b(q^r x), offset 0 algebras
		indexed // b^(r)(x), offset 1 algebras
	};
	Kind kind = Kind::scaled;
	int r = 0;
	static FieldFamily beta_scaled(int r) { return {Kind::scaled, r}; }
	static FieldFamily beta_indexed(int r) { return {Kind::indexed, r}; }
};

/// Throws DomainError when the family does not fit the module's algebra.
OperatorSeries field_of(ModulePtr m, FieldFamily f);

/// Ordinary n-th product; the power k of (x1 - x2) is found by the truncation
/// check. Throws UnsupportedError when no k <= 8 works or an operand is not linear.
OperatorSeries eproduct_n(OperatorSeries const &a, OperatorSeries const &b, int n);

/// phi-coordinated n-th product with an explicit multiplier. Throws
/// UnsupportedError when p is not homogeneous or does not regularize the pair.
OperatorSeries phi_product_n(OperatorSeries const &a, OperatorSeries const &b, int n, Multiplier const &p);
/// Same with the catalog multiplier for the pair (raised as needed for weighted operands).
OperatorSeries phi_product_n(OperatorSeries const &a, OperatorSeries const &b, int n);
/// a^e_n b for n in [lo, hi], sharing one evaluation cache.
std::vector<OperatorSeries> phi_product_range(OperatorSeries const &a, OperatorSeries const &b, int lo, int hi, std::optional<Multiplier> p = std::nullopt);

/// The series (p(x1,x) a(x1) b(x))|_{x1 = x e^z}, coefficient of z^t.
OperatorSeries phi_numerator(OperatorSeries const &a, OperatorSeries const &b, Multiplier const &p, int t);

/// Catalog multiplier for b(q^r x), b(q^s x):
///   Hq      (x1 - q^{d+1} x2)(q x1 - q^d x2),        d = s - r
///   HtildeQ (x1 - q^d x2)^2 (x1 - q^{d+1} x2)^2
///   Bhat, BhatQ, GradedL (x1 - x2)^2
Multiplier catalog_multiplier(AlgebraTag tag, int r, int s);

/// State-to-field map from V_Bhat (W = Hq module) or V_BhatQ (W = HtildeQ module):
/// b^(r)_{-k} w -> b(q^r x)^e_{-k} psi(w). States of degree <= 2.
OperatorSeries psi_map(FockVector const &v, ModulePtr w);

/// Vertex operator on V = Bhat / BhatQ Fock module itself through ordinary
/// products: b^(r)_{-k} w -> b^(r)(x)_{-k} Y(w). States of degree <= 2.
OperatorSeries state_field(FockVector const &v);

/// D on a Bhat / BhatQ Fock module: D|0> = 0, [D, b^(r)_m] = -m b^(r)_{m-1}.
FockVector translation(FockVector const &v);

/// Y(u, x) v - e^{xD} Y(v, -x) u, coefficient of x^e for e in [lo, order].
std::vector<std::pair<long, FockVector>> skew_defect(FockVector const &u, FockVector const &v, int order);

struct SKernel
{
	int r = 0, s = 0;
	TruncatedLaurent g; // in "x"
};

/// S(x)(b^(s) (x) b^(r)) = b^(s) (x) b^(r) + g_{r,s}(x) 1 (x) 1 on V_BhatQ(l, 0),
/// through x^order. Throws DomainError if the defect is not a multiple of 1.
SKernel extract_s_kernel(int r, int s, int order, Scalar const &level = Scalar::level());

/// Drop every cached product evaluation (tests use it between modes).
void clear_product_caches();

} // namespace qheis
