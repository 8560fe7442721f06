#include "qheis/scalar.hpp"

#include "qheis/error.hpp"

#include <ostream>

namespace qheis {

RationalPoint::RationalPoint(mpq_class q0, mpq_class l0) : q_(std::move(q0)), l_(std::move(l0))
{
	if (q_ == 0 || q_ == 1 || q_ == -1)
		throw DomainError("q0 must not be 0, 1 or -1 (got " + q_.get_str() + ")");
}

namespace {
thread_local RationalPoint const *g_point = nullptr;
}

ScopedPoint::ScopedPoint(RationalPoint const &p) : prev_(g_point), point_(p) { g_point = &point_; }
ScopedPoint::~ScopedPoint() { g_point = prev_; }

RationalPoint const *active_point() { return g_point; }

std::string mode_key() { return g_point ? g_point->q().get_str() + "," + g_point->level().get_str() : std::string(); }

Scalar::Scalar(mpq_class const &r)
{
	mpq_class c = r;
	c.canonicalize();
	num_ = BiPoly(UPoly(c.get_num()));
	den_ = BiPoly(UPoly(c.get_den()));
}

Scalar Scalar::normalize(BiPoly num, BiPoly den)
{
	if (den.is_zero())
		throw ZeroDenominator();
	Scalar s;
	if (num.is_zero())
		return s;
	if (!den.is_constant() || !num.is_constant())
	{
		BiPoly g = gcd(num, den);
		if (!(g == BiPoly(1)))
		{
			num = divexact(num, g);
			den = divexact(den, g);
		}
	}
	else
	{
		mpz_class a = num.lc().lc(), b = den.lc().lc(), g;
		mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
		num = BiPoly(UPoly(mpz_class(a / g)));
		den = BiPoly(UPoly(mpz_class(b / g)));
	}
	if (den.sign() < 0)
	{
		num = -num;
		den = -den;
	}
	s.num_ = std::move(num);
	s.den_ = std::move(den);
	return s;
}

Scalar Scalar::q()
{
	if (g_point)
		return Scalar(g_point->q());
	Scalar s;
	s.num_ = BiPoly::q();
	return s;
}

Scalar Scalar::level()
{
	if (g_point)
		return Scalar(g_point->level());
	Scalar s;
	s.num_ = BiPoly::level();
	return s;
}

Scalar Scalar::qpow(int n)
{
	if (g_point)
		return Scalar(g_point->q()).pow(n);
	Scalar s;
	UPoly m = UPoly::monomial(1, n >= 0 ? n : -n);
	if (n >= 0)
		s.num_ = BiPoly(m);
	else
	{
		s.num_ = BiPoly(1);
		s.den_ = BiPoly(m);
	}
	return s;
}

mpq_class Scalar::constant_value() const
{
	if (!is_constant())
		throw Error("Scalar::constant_value on non-constant " + to_string());
	mpq_class n = num_.is_zero() ? mpq_class(0) : mpq_class(num_.lc().lc());
	mpq_class d = den_.lc().lc();
	mpq_class r = n / d;
	r.canonicalize();
	return r;
}

Scalar Scalar::operator-() const
{
	Scalar r = *this;
	r.num_ = -r.num_;
	return r;
}

Scalar &Scalar::operator+=(Scalar const &o)
{
	if (o.is_zero())
		return *this;
	if (is_zero())
		return *this = o;
	if (den_ == o.den_)
		return *this = normalize(num_ + o.num_, den_);
	if (den_.is_constant() && o.den_.is_constant())
	{
		BiPoly a = num_ * o.den_, b = o.num_ * den_;
		return *this = normalize(a + b, den_ * o.den_);
	}
	BiPoly g = gcd(den_, o.den_);
	BiPoly da = divexact(den_, g), db = divexact(o.den_, g);
	return *this = normalize(num_ * db + o.num_ * da, den_ * db);
}

Scalar &Scalar::operator-=(Scalar const &o) { return *this += -o; }

namespace {

mpz_class int_content(BiPoly const &p)
{
	mpz_class g = 0;
	for (auto const &t : p.terms())
	{
		mpz_class c = t.content();
		mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
		if (g == 1)
			break;
	}
	return g;
}

// x * (a/b) for x non-constant; only integer factors can cancel
void scale(BiPoly &num, BiPoly &den, mpq_class const &c)
{
	mpz_class a = c.get_num(), b = c.get_den(), g1, g2;
	mpz_class cd = int_content(den), cn = int_content(num);
	mpz_gcd(g1.get_mpz_t(), a.get_mpz_t(), cd.get_mpz_t());
	mpz_gcd(g2.get_mpz_t(), b.get_mpz_t(), cn.get_mpz_t());
	if (g2 != 1)
		num = num.divexact(UPoly(g2));
	if (g1 != 1)
		den = den.divexact(UPoly(g1));
	mpz_class na = a / g1, nb = b / g2;
	if (na != 1)
		num = num * UPoly(na);
	if (nb != 1)
		den = den * UPoly(nb);
	if (den.sign() < 0)
	{
		num = -num;
		den = -den;
	}
}

} // namespace

Scalar &Scalar::operator*=(Scalar const &o)
{
	if (is_zero() || o.is_zero())
		return *this = Scalar();
	if (is_constant() && o.is_constant())
		return *this = Scalar(constant_value() * o.constant_value());
	if (o.is_constant())
	{
		scale(num_, den_, o.constant_value());
		return *this;
	}
	if (is_constant())
	{
		mpq_class c = constant_value();
		num_ = o.num_;
		den_ = o.den_;
		scale(num_, den_, c);
		return *this;
	}
	BiPoly g1 = gcd(num_, o.den_), g2 = gcd(o.num_, den_);
	BiPoly n = divexact(num_, g1) * divexact(o.num_, g2);
	BiPoly d = divexact(den_, g2) * divexact(o.den_, g1);
	if (d.sign() < 0)
	{
		n = -n;
		d = -d;
	}
	num_ = std::move(n);
	den_ = std::move(d);
	return *this;
}

Scalar &Scalar::operator/=(Scalar const &o) { return *this *= o.inv(); }

Scalar Scalar::inv() const
{
	if (is_zero())
		throw ZeroDenominator();
	Scalar r;
	r.num_ = den_;
	r.den_ = num_;
	if (r.den_.sign() < 0)
	{
		r.num_ = -r.num_;
		r.den_ = -r.den_;
	}
	return r;
}

Scalar Scalar::pow(int n) const
{
	if (n < 0)
		return inv().pow(-n);
	Scalar r(1), b = *this;
	while (n > 0)
	{
		if (n & 1)
			r *= b;
		b *= b;
		n >>= 1;
	}
	return r;
}

mpq_class Scalar::evaluate_at(RationalPoint const &p) const
{
	mpq_class d = den_.eval(p.q(), p.level());
	if (d == 0)
	{
		// name the linear factor (b*q - a) or (d*l - c) that divides the denominator
		std::string factor = den_.to_string();
		mpq_class q0 = p.q(), l0 = p.level();
		BiPoly lq(std::vector<UPoly>{UPoly(std::vector<mpz_class>{-q0.get_num(), q0.get_den()})});
		BiPoly ll(std::vector<UPoly>{UPoly(mpz_class(-l0.get_num())), UPoly(mpz_class(l0.get_den()))});
		if (!gcd(den_, lq).is_constant())
			factor = lq.to_string();
		else if (!gcd(den_, ll).is_constant())
			factor = ll.to_string();
		throw EvaluationError("denominator factor (" + factor + ") vanishes at q=" + q0.get_str() + ", l=" + l0.get_str());
	}
	mpq_class r = num_.eval(p.q(), p.level()) / d;
	r.canonicalize();
	return r;
}

std::string Scalar::to_string() const
{
	if (den_ == BiPoly(1))
		return num_.to_string();
	auto wrap = [](BiPoly const &p) {
		std::string s = p.to_string();
		bool simple = s.find_first_of(" *^") == std::string::npos && s[0] != '-';
		return simple ? s : "(" + s + ")";
	};
	return wrap(num_) + "/" + wrap(den_);
}

std::ostream &operator<<(std::ostream &os, Scalar const &s) { return os << s.to_string(); }

Scalar qint(int m)
{
	if (m == 0)
		return Scalar();
	if (m < 0)
		return -qint(-m);
	if (g_point)
	{
		Scalar q = Scalar::q();
		return (q.pow(m) - q.pow(-m)) / (q - q.inv());
	}
	// q^{-(m-1)} * (1 + q^2 + ... + q^{2(m-1)})
	std::vector<mpz_class> c(static_cast<std::size_t>(2 * (m - 1) + 1));
	for (int i = 0; i < m; ++i)
		c[static_cast<std::size_t>(2 * i)] = 1;
	return Scalar::normalize(BiPoly(UPoly(std::move(c))), BiPoly(UPoly::monomial(1, m - 1)));
}

mpz_class binomial(long n, long k)
{
	if (k < 0)
		return 0;
	mpz_class r = 1;
	for (long i = 0; i < k; ++i)
	{
		r *= (n - i);
		r /= (i + 1); // r == C(n, i+1) here
	}
	return r;
}

} // namespace qheis
