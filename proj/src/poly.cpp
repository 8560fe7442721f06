#include "qheis/poly.hpp"

#include "qheis/error.hpp"

#include <algorithm>
#include <functional>
#include <utility>

namespace qheis {

// ---------------------------------------------------------------- UPoly

UPoly::UPoly(long c) : UPoly(mpz_class(c)) {}

UPoly::UPoly(mpz_class c)
{
	if (c != 0)
		c_.push_back(std::move(c));
}

UPoly::UPoly(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) { trim(); }

UPoly UPoly::monomial(mpz_class c, int degree)
{
	if (c == 0)
		return {};
	std::vector<mpz_class> v(static_cast<std::size_t>(degree) + 1);
	v.back() = std::move(c);
	return UPoly(std::move(v));
}

void UPoly::trim()
{
	while (!c_.empty() && c_.back() == 0)
		c_.pop_back();
}

mpz_class UPoly::coeff(int i) const
{
	if (i < 0 || i >= static_cast<int>(c_.size()))
		return 0;
	return c_[static_cast<std::size_t>(i)];
}

UPoly &UPoly::operator+=(UPoly const &o)
{
	if (o.c_.size() > c_.size())
		c_.resize(o.c_.size());
	for (std::size_t i = 0; i < o.c_.size(); ++i)
		c_[i] += o.c_[i];
	trim();
	return *this;
}

UPoly &UPoly::operator-=(UPoly const &o)
{
	if (o.c_.size() > c_.size())
		c_.resize(o.c_.size());
	for (std::size_t i = 0; i < o.c_.size(); ++i)
		c_[i] -= o.c_[i];
	trim();
	return *this;
}

UPoly &UPoly::operator*=(mpz_class const &s)
{
	if (s == 0)
	{
		c_.clear();
		return *this;
	}
	for (auto &x : c_)
		x *= s;
	return *this;
}

UPoly UPoly::operator-() const
{
	UPoly r = *this;
	for (auto &x : r.c_)
		x = -x;
	return r;
}

UPoly operator*(UPoly const &a, UPoly const &b)
{
	if (a.is_zero() || b.is_zero())
		return {};
	std::vector<mpz_class> r(a.c_.size() + b.c_.size() - 1);
	for (std::size_t i = 0; i < a.c_.size(); ++i)
	{
		if (a.c_[i] == 0)
			continue;
		for (std::size_t j = 0; j < b.c_.size(); ++j)
			r[i + j] += a.c_[i] * b.c_[j];
	}
	return UPoly(std::move(r));
}

mpz_class UPoly::content() const
{
	mpz_class g = 0;
	for (auto const &x : c_)
	{
		mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
		if (g == 1)
			break;
	}
	return g;
}

UPoly UPoly::divexact(mpz_class const &s) const
{
	UPoly r = *this;
	for (auto &x : r.c_)
		mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), s.get_mpz_t());
	return r;
}

UPoly UPoly::shifted(int k) const
{
	if (is_zero() || k == 0)
		return *this;
	std::vector<mpz_class> v(static_cast<std::size_t>(k));
	v.insert(v.end(), c_.begin(), c_.end());
	return UPoly(std::move(v));
}

mpq_class UPoly::eval(mpq_class const &x) const
{
	mpq_class acc = 0;
	for (auto it = c_.rbegin(); it != c_.rend(); ++it)
		acc = acc * x + mpq_class(*it);
	return acc;
}

UPoly divexact(UPoly const &a, UPoly const &b)
{
	if (b.is_zero())
		throw ZeroDenominator();
	if (a.is_zero())
		return {};
	if (b.degree() == 0)
	{
		if (a.content() % b.lc() != 0)
			throw Error("UPoly divexact: not divisible");
		return a.divexact(b.lc());
	}
	if (a.degree() < b.degree())
		throw Error("UPoly divexact: not divisible");
	std::vector<mpz_class> rem = a.coeffs();
	std::vector<mpz_class> quo(static_cast<std::size_t>(a.degree() - b.degree() + 1));
	auto const &bc = b.coeffs();
	int db = b.degree();
	for (int k = a.degree(); k >= db; --k)
	{
		mpz_class &top = rem[static_cast<std::size_t>(k)];
		if (top == 0)
			continue;
		mpz_class qk;
		mpz_class r;
		mpz_tdiv_qr(qk.get_mpz_t(), r.get_mpz_t(), top.get_mpz_t(), b.lc().get_mpz_t());
		if (r != 0)
			throw Error("UPoly divexact: not divisible");
		quo[static_cast<std::size_t>(k - db)] = qk;
		for (int i = 0; i <= db; ++i)
			rem[static_cast<std::size_t>(k - db + i)] -= qk * bc[static_cast<std::size_t>(i)];
	}
	for (auto const &x : rem)
		if (x != 0)
			throw Error("UPoly divexact: not divisible");
	return UPoly(std::move(quo));
}

UPoly prem(UPoly a, UPoly const &b)
{
	int db = b.degree();
	mpz_class const &lb = b.lc();
	while (!a.is_zero() && a.degree() >= db)
	{
		UPoly t = b.shifted(a.degree() - db) * a.lc();
		a *= lb;
		a -= t;
	}
	return a;
}

namespace {

UPoly primitive_part(UPoly const &a)
{
	if (a.is_zero())
		return a;
	mpz_class c = a.content();
	if (a.lc() < 0)
		c = -c;
	return a.divexact(c);
}

} // namespace

namespace {

// Arithmetic mod the Mersenne prime 2^61 - 1.
using u64 = unsigned long;
constexpr u64 kP = (u64(1) << 61) - 1;

u64 mulmod(u64 a, u64 b) { return static_cast<u64>(static_cast<unsigned __int128>(a) * b % kP); }

u64 powmod(u64 a, u64 e)
{
	u64 r = 1;
	for (; e; e >>= 1, a = mulmod(a, a))
		if (e & 1)
			r = mulmod(r, a);
	return r;
}

std::vector<u64> reduce_mod(UPoly const &a)
{
	std::vector<u64> r;
	r.reserve(a.coeffs().size());
	for (auto const &c : a.coeffs())
		r.push_back(mpz_fdiv_ui(c.get_mpz_t(), kP));
	while (!r.empty() && r.back() == 0)
		r.pop_back();
	return r;
}

// Degree of the gcd mod p bounds the degree over Z from above when p keeps
// both leading coefficients, so a constant gcd mod p certifies coprimality.
bool coprime_mod_p(UPoly const &a, UPoly const &b)
{
	std::vector<u64> x = reduce_mod(a), y = reduce_mod(b);
	if (x.size() != a.coeffs().size() || y.size() != b.coeffs().size())
		return false;
	if (x.size() < y.size())
		std::swap(x, y);
	while (y.size() > 1)
	{
		u64 inv = powmod(y.back(), kP - 2);
		while (x.size() >= y.size())
		{
			u64 f = mulmod(x.back(), inv);
			std::size_t sh = x.size() - y.size();
			for (std::size_t i = 0; i < y.size(); ++i)
				x[sh + i] = (x[sh + i] + kP - mulmod(f, y[i])) % kP;
			while (!x.empty() && x.back() == 0)
				x.pop_back();
			if (x.empty())
				return false;
		}
		std::swap(x, y);
	}
	return !y.empty();
}

} // namespace

UPoly gcd(UPoly const &a, UPoly const &b)
{
	if (a.is_zero())
		return primitive_part(b) * b.content();
	if (b.is_zero())
		return primitive_part(a) * a.content();
	mpz_class g;
	mpz_class ca = a.content(), cb = b.content();
	mpz_gcd(g.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
	if (a.degree() == 0 || b.degree() == 0)
		return UPoly(g);
	if (coprime_mod_p(a, b))
		return UPoly(g);
	UPoly x = primitive_part(a), y = primitive_part(b);
	if (x.degree() < y.degree())
		std::swap(x, y);
	while (!y.is_zero())
	{
		UPoly r = prem(x, y);
		x = std::move(y);
		y = primitive_part(r);
	}
	return primitive_part(x) * g;
}

// ---------------------------------------------------------------- BiPoly

BiPoly::BiPoly(UPoly c)
{
	if (!c.is_zero())
		t_.push_back(std::move(c));
}

BiPoly::BiPoly(std::vector<UPoly> terms) : t_(std::move(terms)) { trim(); }

BiPoly BiPoly::q() { return BiPoly(UPoly::monomial(1, 1)); }

BiPoly BiPoly::level() { return BiPoly(std::vector<UPoly>{UPoly(), UPoly(1)}); }

void BiPoly::trim()
{
	while (!t_.empty() && t_.back().is_zero())
		t_.pop_back();
}

UPoly BiPoly::coeff(int j) const
{
	if (j < 0 || j >= static_cast<int>(t_.size()))
		return {};
	return t_[static_cast<std::size_t>(j)];
}

int BiPoly::sign() const
{
	if (t_.empty())
		return 0;
	return sgn(t_.back().lc());
}

BiPoly &BiPoly::operator+=(BiPoly const &o)
{
	if (o.t_.size() > t_.size())
		t_.resize(o.t_.size());
	for (std::size_t i = 0; i < o.t_.size(); ++i)
		t_[i] += o.t_[i];
	trim();
	return *this;
}

BiPoly &BiPoly::operator-=(BiPoly const &o)
{
	if (o.t_.size() > t_.size())
		t_.resize(o.t_.size());
	for (std::size_t i = 0; i < o.t_.size(); ++i)
		t_[i] -= o.t_[i];
	trim();
	return *this;
}

BiPoly BiPoly::operator-() const
{
	BiPoly r = *this;
	for (auto &x : r.t_)
		x = -x;
	return r;
}

BiPoly operator*(BiPoly const &a, BiPoly const &b)
{
	if (a.is_zero() || b.is_zero())
		return {};
	std::vector<UPoly> r(a.t_.size() + b.t_.size() - 1);
	for (std::size_t i = 0; i < a.t_.size(); ++i)
	{
		if (a.t_[i].is_zero())
			continue;
		for (std::size_t j = 0; j < b.t_.size(); ++j)
			if (!b.t_[j].is_zero())
				r[i + j] += a.t_[i] * b.t_[j];
	}
	return BiPoly(std::move(r));
}

BiPoly operator*(BiPoly const &a, UPoly const &b)
{
	if (b.is_zero())
		return {};
	BiPoly r = a;
	for (auto &x : r.t_)
		x = x * b;
	r.trim();
	return r;
}

UPoly BiPoly::content() const
{
	UPoly g;
	for (auto const &x : t_)
	{
		g = gcd(g, x);
		if (g.degree() == 0 && g.lc() == 1)
			break;
	}
	return g;
}

BiPoly BiPoly::divexact(UPoly const &s) const
{
	BiPoly r = *this;
	for (auto &x : r.t_)
		x = qheis::divexact(x, s);
	return r;
}

BiPoly BiPoly::shifted(int k) const
{
	if (is_zero() || k == 0)
		return *this;
	std::vector<UPoly> v(static_cast<std::size_t>(k));
	v.insert(v.end(), t_.begin(), t_.end());
	return BiPoly(std::move(v));
}

mpq_class BiPoly::eval(mpq_class const &q, mpq_class const &l) const
{
	mpq_class acc = 0;
	for (auto it = t_.rbegin(); it != t_.rend(); ++it)
		acc = acc * l + it->eval(q);
	return acc;
}

std::size_t BiPoly::hash() const
{
	std::size_t h = 0x9e3779b97f4a7c15ull;
	for (std::size_t j = 0; j < t_.size(); ++j)
		for (std::size_t i = 0; i < t_[j].coeffs().size(); ++i)
		{
			auto const &c = t_[j].coeffs()[i];
			std::size_t v = c.fits_slong_p() ? static_cast<std::size_t>(c.get_si()) : mpz_sizeinbase(c.get_mpz_t(), 16);
			h ^= std::hash<std::size_t>{}(v + 31 * i + 1009 * j) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
		}
	return h;
}

std::string BiPoly::to_string() const
{
	if (is_zero())
		return "0";
	std::string out;
	bool first = true;
	for (int j = degree(); j >= 0; --j)
	{
		auto const &u = t_[static_cast<std::size_t>(j)];
		for (int i = u.degree(); i >= 0; --i)
		{
			mpz_class c = u.coeff(i);
			if (c == 0)
				continue;
			bool neg = c < 0;
			mpz_class a = abs(c);
			if (first)
				out += neg ? "-" : "";
			else
				out += neg ? " - " : " + ";
			first = false;
			std::string body;
			auto add = [&](std::string const &f) {
				if (!body.empty())
					body += "*";
				body += f;
			};
			if (a != 1 || (i == 0 && j == 0))
				add(a.get_str());
			if (i == 1)
				add("q");
			else if (i > 1)
				add("q^" + std::to_string(i));
			if (j == 1)
				add("l");
			else if (j > 1)
				add("l^" + std::to_string(j));
			out += body;
		}
	}
	return out;
}

BiPoly divexact(BiPoly const &a, BiPoly const &b)
{
	if (b.is_zero())
		throw ZeroDenominator();
	if (a.is_zero())
		return {};
	if (b.degree() == 0)
		return a.divexact(b.lc());
	if (a.degree() < b.degree())
		throw Error("BiPoly divexact: not divisible");
	std::vector<UPoly> rem = a.terms();
	std::vector<UPoly> quo(static_cast<std::size_t>(a.degree() - b.degree() + 1));
	int db = b.degree();
	for (int k = a.degree(); k >= db; --k)
	{
		UPoly const top = rem[static_cast<std::size_t>(k)];
		if (top.is_zero())
			continue;
		UPoly qk = divexact(top, b.lc());
		quo[static_cast<std::size_t>(k - db)] = qk;
		for (int i = 0; i <= db; ++i)
			rem[static_cast<std::size_t>(k - db + i)] -= qk * b.terms()[static_cast<std::size_t>(i)];
	}
	for (auto const &x : rem)
		if (!x.is_zero())
			throw Error("BiPoly divexact: not divisible");
	return BiPoly(std::move(quo));
}

namespace {

BiPoly bi_primitive(BiPoly const &a)
{
	if (a.is_zero())
		return a;
	UPoly c = a.content();
	if (a.sign() < 0)
		c = -c;
	return a.divexact(c);
}

BiPoly bi_prem(BiPoly a, BiPoly const &b)
{
	int db = b.degree();
	UPoly const &lb = b.lc();
	while (!a.is_zero() && a.degree() >= db)
	{
		BiPoly t = b.shifted(a.degree() - db) * a.lc();
		a = a * lb;
		a -= t;
	}
	return a;
}

} // namespace

namespace {

// c*q^k with a single nonzero coefficient
bool monomial_of(BiPoly const &p, int &k)
{
	if (p.degree() != 0)
		return false;
	auto const &c = p.terms()[0].coeffs();
	for (std::size_t i = 0; i + 1 < c.size(); ++i)
		if (c[i] != 0)
			return false;
	k = static_cast<int>(c.size()) - 1;
	return true;
}

// gcd(c*q^k, b) = gcd(c, integer content of b) * q^min(k, q-valuation of b)
BiPoly gcd_with_monomial(int k, mpz_class const &c, BiPoly const &b)
{
	mpz_class g = abs(c);
	int v = k;
	for (auto const &t : b.terms())
	{
		auto const &cs = t.coeffs();
		for (std::size_t i = 0; i < cs.size(); ++i)
		{
			if (cs[i] == 0)
				continue;
			if (static_cast<int>(i) < v)
				v = static_cast<int>(i);
			if (g != 1)
				mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), cs[i].get_mpz_t());
		}
	}
	return BiPoly(UPoly::monomial(g, v));
}

} // namespace

BiPoly gcd(BiPoly const &a, BiPoly const &b)
{
	if (a.is_zero())
		return b.sign() < 0 ? -b : b;
	if (b.is_zero())
		return a.sign() < 0 ? -a : a;
	int k;
	if (monomial_of(a, k))
		return gcd_with_monomial(k, a.terms()[0].lc(), b);
	if (monomial_of(b, k))
		return gcd_with_monomial(k, b.terms()[0].lc(), a);
	if (a.degree() == 0 || b.degree() == 0)
	{
		// one side is free of l: the gcd divides every Z[q] coefficient of the other
		BiPoly const &f = a.degree() == 0 ? a : b, &o = a.degree() == 0 ? b : a;
		UPoly g = f.terms()[0];
		for (auto const &t : o.terms())
		{
			if (g.degree() == 0)
				break;
			if (!t.is_zero())
				g = gcd(g, t);
		}
		if (g.degree() == 0)
		{
			mpz_class c = g.lc() < 0 ? mpz_class(-g.lc()) : g.lc();
			for (auto const &t : o.terms())
				if (c != 1 && !t.is_zero())
				{
					mpz_class ct = t.content();
					mpz_gcd(c.get_mpz_t(), c.get_mpz_t(), ct.get_mpz_t());
				}
			return BiPoly(UPoly(c));
		}
		return BiPoly(g);
	}
	UPoly g = gcd(a.content(), b.content());
	BiPoly x = bi_primitive(a), y = bi_primitive(b);
	if (x.degree() < y.degree())
		std::swap(x, y);
	while (!y.is_zero())
	{
		BiPoly r = bi_prem(x, y);
		x = std::move(y);
		y = bi_primitive(r);
	}
	return bi_primitive(x) * g;
}

} // namespace qheis
