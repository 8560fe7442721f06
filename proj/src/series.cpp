#include "qheis/series.hpp"

#include "qheis/error.hpp"

#include <algorithm>
#include <sstream>

namespace qheis {

namespace {

long sat_add(long a, long b)
{
	bool ai = a == kInf || a == -kInf, bi = b == kInf || b == -kInf;
	if (ai && bi && a != b)
		throw Error("internal: inf - inf in window arithmetic");
	if (ai)
		return a;
	if (bi)
		return b;
	return std::clamp(a + b, -kInf, kInf);
}

std::string bound(long v)
{
	if (v <= -kInf)
		return "-inf";
	if (v >= kInf)
		return "inf";
	return std::to_string(v);
}

bool in_box(Exponent const &e, std::vector<VarRange> const &r)
{
	for (std::size_t i = 0; i < r.size(); ++i)
		if (e[i] < r[i].lo || e[i] > r[i].hi)
			return false;
	return true;
}

std::vector<std::string> union_vars(std::vector<std::string> const &a, std::vector<std::string> const &b)
{
	std::vector<std::string> u = a;
	for (auto const &v : b)
		if (std::find(u.begin(), u.end(), v) == u.end())
			u.push_back(v);
	if (u.size() > kMaxVars)
		throw SeriesError("more than 3 variables");
	return u;
}

Scalar factorial_inv(int j)
{
	mpz_class f = 1;
	for (int i = 2; i <= j; ++i)
		f *= i;
	return Scalar(mpq_class(1, f));
}

} // namespace

Window::Window(std::vector<std::string> v, std::vector<long> l, std::vector<long> h)
	: vars(std::move(v)), lo(std::move(l)), hi(std::move(h))
{
	if (vars.size() != lo.size() || vars.size() != hi.size())
		throw SeriesError("window: bound count does not match variables");
	if (vars.size() > kMaxVars)
		throw SeriesError("window: more than 3 variables");
	for (std::size_t i = 0; i < vars.size(); ++i)
	{
		for (std::size_t j = 0; j < i; ++j)
			if (vars[i] == vars[j])
				throw SeriesError("window: duplicate variable " + vars[i]);
	}
}

Window Window::symmetric(std::vector<std::string> vars, long n)
{
	std::size_t k = vars.size();
	return Window(std::move(vars), std::vector<long>(k, -n), std::vector<long>(k, n));
}

int Window::index(std::string const &v) const
{
	auto it = std::find(vars.begin(), vars.end(), v);
	return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
}

bool Window::empty() const
{
	for (std::size_t i = 0; i < vars.size(); ++i)
		if (lo[i] > hi[i])
			return true;
	return false;
}

std::string Window::to_string() const
{
	std::string s;
	for (std::size_t i = 0; i < vars.size(); ++i)
	{
		if (i)
			s += ' ';
		s += vars[i] + ":[" + bound(lo[i]) + "," + bound(hi[i]) + "]";
	}
	return s;
}

std::string Direction::to_string() const
{
	switch (kind)
	{
	case Kind::polynomial:
		return "polynomial";
	case Kind::distribution:
		return "distribution";
	case Kind::iota:
		break;
	}
	std::string s = "iota(";
	for (std::size_t i = 0; i < order.size(); ++i)
		s += (i ? "," : "") + order[i];
	return s + ")";
}

Direction combine(Direction const &a, Direction const &b)
{
	if (a.kind == Direction::Kind::polynomial)
		return b;
	if (b.kind == Direction::Kind::polynomial)
		return a;
	if (a == b)
		return a;
	throw SeriesError("mixing expansion directions " + a.to_string() + " and " + b.to_string());
}

void VarRange::normalize()
{
	if (lo <= slo)
		lo = -kInf;
	if (hi >= shi)
		hi = kInf;
}

VarRange convolve(VarRange const &a, VarRange const &b)
{
	bool finite = (a.slo > -kInf || b.shi < kInf) && (a.shi < kInf || b.slo > -kInf);
	if (!finite)
		throw SeriesError("product is an infinite sum (unbounded supports in the same direction)");
	VarRange r;
	r.slo = sat_add(a.slo, b.slo);
	r.shi = sat_add(a.shi, b.shi);
	if (a.lo > -kInf)
		r.lo = std::max(r.lo, sat_add(a.lo, b.shi));
	if (a.hi < kInf)
		r.hi = std::min(r.hi, sat_add(a.hi, b.slo));
	if (b.lo > -kInf)
		r.lo = std::max(r.lo, sat_add(b.lo, a.shi));
	if (b.hi < kInf)
		r.hi = std::min(r.hi, sat_add(b.hi, a.slo));
	r.normalize();
	return r;
}

TruncatedLaurent::TruncatedLaurent(std::vector<std::string> vars, Direction dir)
	: vars_(std::move(vars)), dir_(std::move(dir)), ranges_(vars_.size(), VarRange{-kInf, kInf, 0, 0})
{
	if (vars_.size() > kMaxVars)
		throw SeriesError("more than 3 variables");
}

TruncatedLaurent::TruncatedLaurent(std::vector<std::string> vars, Direction dir, std::vector<VarRange> ranges, Terms terms)
	: vars_(std::move(vars)), dir_(std::move(dir)), ranges_(std::move(ranges)), terms_(std::move(terms))
{
	if (vars_.size() > kMaxVars)
		throw SeriesError("more than 3 variables");
	if (ranges_.size() != vars_.size())
		throw SeriesError("range count does not match variables");
	normalize();
}

void TruncatedLaurent::normalize()
{
	for (auto &r : ranges_)
		r.normalize();
	for (auto it = terms_.begin(); it != terms_.end();)
	{
		Exponent const &e = it->first;
		for (std::size_t i = 0; i < vars_.size(); ++i)
			if (e[i] < ranges_[i].slo || e[i] > ranges_[i].shi)
				throw SeriesError("term " + format_exponent(e) + " lies outside the declared support");
		for (std::size_t i = vars_.size(); i < kMaxVars; ++i)
			if (e[i] != 0)
				throw SeriesError("exponent uses an undeclared variable");
		if (it->second.is_zero() || !in_box(e, ranges_))
			it = terms_.erase(it);
		else
			++it;
	}
}

TruncatedLaurent TruncatedLaurent::constant(Scalar c)
{
	TruncatedLaurent t;
	if (!c.is_zero())
		t.terms_[Exponent{}] = std::move(c);
	return t;
}

TruncatedLaurent TruncatedLaurent::polynomial(std::vector<std::string> vars, Terms terms)
{
	std::vector<VarRange> r(vars.size(), VarRange{-kInf, kInf, kInf, -kInf});
	for (auto it = terms.begin(); it != terms.end();)
	{
		if (it->second.is_zero())
		{
			it = terms.erase(it);
			continue;
		}
		for (std::size_t i = 0; i < vars.size(); ++i)
		{
			r[i].slo = std::min<long>(r[i].slo, it->first[i]);
			r[i].shi = std::max<long>(r[i].shi, it->first[i]);
		}
		++it;
	}
	if (terms.empty())
		for (auto &x : r)
			x.slo = x.shi = 0;
	return TruncatedLaurent(std::move(vars), Direction::polynomial(), std::move(r), std::move(terms));
}

TruncatedLaurent TruncatedLaurent::monomial(std::vector<std::string> vars, Exponent e, Scalar c)
{
	Terms t;
	t[e] = std::move(c);
	return polynomial(std::move(vars), std::move(t));
}

TruncatedLaurent TruncatedLaurent::exp(std::string const &var, Scalar k, int order)
{
	Terms t;
	Scalar kp(1);
	for (int j = 0; j <= order; ++j)
	{
		t[Exponent{j, 0, 0}] = kp * factorial_inv(j);
		kp *= k;
	}
	return TruncatedLaurent({var}, Direction::polynomial(), {VarRange{-kInf, order, 0, kInf}}, std::move(t));
}

int TruncatedLaurent::index(std::string const &v) const
{
	auto it = std::find(vars_.begin(), vars_.end(), v);
	return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
}

VarRange const &TruncatedLaurent::range(std::string const &v) const
{
	int i = index(v);
	if (i < 0)
		throw SeriesError("unknown variable " + v);
	return ranges_[static_cast<std::size_t>(i)];
}

Window TruncatedLaurent::known_window() const
{
	std::vector<long> lo, hi;
	for (auto const &r : ranges_)
	{
		lo.push_back(r.lo);
		hi.push_back(r.hi);
	}
	return Window(vars_, lo, hi);
}

bool TruncatedLaurent::is_known(Exponent const &e) const
{
	if (in_box(e, ranges_))
		return true;
	for (std::size_t i = 0; i < vars_.size(); ++i)
		if (e[i] < ranges_[i].slo || e[i] > ranges_[i].shi)
			return true;
	return false;
}

Scalar TruncatedLaurent::coeff(Exponent const &e) const
{
	if (!is_known(e))
		throw SeriesError("coefficient of " + format_exponent(e) + " lies outside the known window " + known_window().to_string());
	auto it = terms_.find(e);
	return it == terms_.end() ? Scalar() : it->second;
}

Scalar TruncatedLaurent::coeff(std::vector<int> const &e) const
{
	if (e.size() != vars_.size())
		throw SeriesError("exponent arity does not match variables");
	Exponent x{};
	std::copy(e.begin(), e.end(), x.begin());
	return coeff(x);
}

TruncatedLaurent TruncatedLaurent::operator-() const
{
	TruncatedLaurent r = *this;
	for (auto &[e, c] : r.terms_)
		c = -c;
	return r;
}

TruncatedLaurent &TruncatedLaurent::operator*=(Scalar const &c)
{
	if (c.is_zero())
	{
		terms_.clear();
		return *this;
	}
	for (auto &[e, v] : terms_)
		v *= c;
	return *this;
}

TruncatedLaurent TruncatedLaurent::with_vars(std::vector<std::string> const &vars) const
{
	if (vars == vars_)
		return *this;
	if (vars.size() > kMaxVars)
		throw SeriesError("more than 3 variables");
	std::vector<int> where(vars_.size());
	for (std::size_t i = 0; i < vars_.size(); ++i)
	{
		auto it = std::find(vars.begin(), vars.end(), vars_[i]);
		if (it == vars.end())
			throw SeriesError("with_vars: variable " + vars_[i] + " dropped");
		where[i] = static_cast<int>(it - vars.begin());
	}
	std::vector<VarRange> r(vars.size(), VarRange{-kInf, kInf, 0, 0});
	for (std::size_t i = 0; i < vars_.size(); ++i)
		r[static_cast<std::size_t>(where[i])] = ranges_[i];
	Terms t;
	for (auto const &[e, c] : terms_)
	{
		Exponent x{};
		for (std::size_t i = 0; i < vars_.size(); ++i)
			x[static_cast<std::size_t>(where[i])] = e[i];
		t.emplace(x, c);
	}
	return TruncatedLaurent(vars, dir_, std::move(r), std::move(t));
}

TruncatedLaurent operator+(TruncatedLaurent const &a0, TruncatedLaurent const &b0)
{
	auto vars = union_vars(a0.vars_, b0.vars_);
	TruncatedLaurent a = a0.with_vars(vars), b = b0.with_vars(vars);
	Direction d = combine(a.dir_, b.dir_);
	std::vector<VarRange> r(vars.size());
	for (std::size_t i = 0; i < vars.size(); ++i)
	{
		r[i].lo = std::max(a.ranges_[i].lo, b.ranges_[i].lo);
		r[i].hi = std::min(a.ranges_[i].hi, b.ranges_[i].hi);
		r[i].slo = std::min(a.ranges_[i].slo, b.ranges_[i].slo);
		r[i].shi = std::max(a.ranges_[i].shi, b.ranges_[i].shi);
	}
	TruncatedLaurent::Terms t = a.terms_;
	for (auto const &[e, c] : b.terms_)
	{
		auto [it, fresh] = t.emplace(e, c);
		if (!fresh)
			it->second += c;
	}
	return TruncatedLaurent(std::move(vars), d, std::move(r), std::move(t));
}

TruncatedLaurent operator-(TruncatedLaurent const &a, TruncatedLaurent const &b) { return a + (-b); }

TruncatedLaurent operator*(TruncatedLaurent const &a0, TruncatedLaurent const &b0)
{
	auto vars = union_vars(a0.vars_, b0.vars_);
	TruncatedLaurent a = a0.with_vars(vars), b = b0.with_vars(vars);
	Direction d = combine(a.dir_, b.dir_);
	std::vector<VarRange> r(vars.size());
	for (std::size_t i = 0; i < vars.size(); ++i)
	{
		try
		{
			r[i] = convolve(a.ranges_[i], b.ranges_[i]);
		}
		catch (SeriesError const &)
		{
			throw SeriesError("product is an infinite sum in variable " + vars[i]);
		}
	}
	TruncatedLaurent::Terms t;
	for (auto const &[ea, ca] : a.terms_)
		for (auto const &[eb, cb] : b.terms_)
		{
			Exponent e{};
			for (std::size_t i = 0; i < kMaxVars; ++i)
				e[i] = ea[i] + eb[i];
			if (!in_box(e, r))
				continue;
			Scalar p = ca * cb;
			auto [it, fresh] = t.emplace(e, p);
			if (!fresh)
				it->second += p;
		}
	return TruncatedLaurent(std::move(vars), d, std::move(r), std::move(t));
}

TruncatedLaurent TruncatedLaurent::pow(int k) const
{
	if (k < 0)
		throw SeriesError("negative power of a series; use series_inverse");
	TruncatedLaurent r = constant(Scalar(1)).with_vars(vars_);
	for (int i = 0; i < k; ++i)
		r = r * *this;
	return r;
}

TruncatedLaurent TruncatedLaurent::shifted(Exponent const &e) const
{
	std::vector<VarRange> r = ranges_;
	for (std::size_t i = 0; i < vars_.size(); ++i)
	{
		r[i].lo = sat_add(r[i].lo, e[i]);
		r[i].hi = sat_add(r[i].hi, e[i]);
		r[i].slo = sat_add(r[i].slo, e[i]);
		r[i].shi = sat_add(r[i].shi, e[i]);
	}
	Terms t;
	for (auto const &[x, c] : terms_)
	{
		Exponent y{};
		for (std::size_t i = 0; i < kMaxVars; ++i)
			y[i] = x[i] + e[i];
		t.emplace(y, c);
	}
	return TruncatedLaurent(vars_, dir_, std::move(r), std::move(t));
}

TruncatedLaurent TruncatedLaurent::restricted(Window const &w) const
{
	std::vector<VarRange> r = ranges_;
	for (std::size_t k = 0; k < w.size(); ++k)
	{
		int i = index(w.vars[k]);
		if (i < 0)
			continue;
		auto &x = r[static_cast<std::size_t>(i)];
		x.lo = std::max(x.lo, w.lo[k]);
		x.hi = std::min(x.hi, w.hi[k]);
	}
	return TruncatedLaurent(vars_, dir_, std::move(r), terms_);
}

TruncatedLaurent TruncatedLaurent::as_distribution() const { return retagged(Direction::distribution()); }

TruncatedLaurent TruncatedLaurent::retagged(Direction d) const
{
	TruncatedLaurent r = *this;
	r.dir_ = std::move(d);
	return r;
}

TruncatedLaurent TruncatedLaurent::specialize(RationalPoint const &p) const
{
	TruncatedLaurent r = *this;
	for (auto it = r.terms_.begin(); it != r.terms_.end();)
	{
		it->second = it->second.specialize(p);
		if (it->second.is_zero())
			it = r.terms_.erase(it);
		else
			++it;
	}
	return r;
}

TruncatedLaurent TruncatedLaurent::slice(std::string const &v, int k) const
{
	int iv = index(v);
	if (iv < 0)
		return k == 0 ? *this : TruncatedLaurent(vars_, dir_);
	auto i = static_cast<std::size_t>(iv);
	VarRange const &rv = ranges_[i];
	std::vector<std::string> vars;
	std::vector<VarRange> r;
	for (std::size_t j = 0; j < vars_.size(); ++j)
		if (j != i)
		{
			vars.push_back(vars_[j]);
			r.push_back(ranges_[j]);
		}
	Direction d = dir_;
	d.order.erase(std::remove(d.order.begin(), d.order.end(), v), d.order.end());
	if (k < rv.slo || k > rv.shi)
		return TruncatedLaurent(vars, d);
	if (k < rv.lo || k > rv.hi)
		throw SeriesError("slice " + v + "^" + std::to_string(k) + " lies outside the known window " + known_window().to_string());
	Terms t;
	for (auto const &[e, c] : terms_)
	{
		if (e[i] != k)
			continue;
		Exponent x{};
		for (std::size_t j = 0, n = 0; j < vars_.size(); ++j)
			if (j != i)
				x[n++] = e[j];
		t.emplace(x, c);
	}
	return TruncatedLaurent(std::move(vars), d, std::move(r), std::move(t));
}

TruncatedLaurent TruncatedLaurent::derivative(std::string const &v) const
{
	int iv = index(v);
	if (iv < 0)
		return TruncatedLaurent(vars_, dir_);
	auto i = static_cast<std::size_t>(iv);
	std::vector<VarRange> r = ranges_;
	r[i].lo = sat_add(r[i].lo, -1);
	r[i].hi = sat_add(r[i].hi, -1);
	r[i].slo = sat_add(r[i].slo, -1);
	r[i].shi = sat_add(r[i].shi, -1);
	Terms t;
	for (auto const &[e, c] : terms_)
	{
		if (e[i] == 0)
			continue;
		Exponent x = e;
		--x[i];
		t.emplace(x, c * Scalar(static_cast<long>(e[i])));
	}
	return TruncatedLaurent(vars_, dir_, std::move(r), std::move(t));
}

TruncatedLaurent TruncatedLaurent::renamed(std::string const &from, std::string const &to) const
{
	if (from == to)
		return *this;
	if (index(to) >= 0)
		throw SeriesError("rename: variable " + to + " already present");
	TruncatedLaurent r = *this;
	for (auto &v : r.vars_)
		if (v == from)
			v = to;
	for (auto &v : r.dir_.order)
		if (v == from)
			v = to;
	return r;
}

TruncatedLaurent TruncatedLaurent::subst_exp(std::string const &from, std::string const &base, std::string const &zvar, int z_order) const
{
	int ifrom = index(from);
	if (ifrom < 0)
		throw SeriesError("subst_exp: variable " + from + " not present");
	if (index(zvar) >= 0 || zvar == base)
		throw SeriesError("subst_exp: variable " + zvar + " already present");
	if (z_order < 0)
		throw SeriesError("subst_exp: negative z order");
	auto f = static_cast<std::size_t>(ifrom);
	int ibase = index(base);

	std::vector<std::string> vars;
	std::vector<VarRange> r;
	std::vector<int> where(vars_.size(), -1);
	for (std::size_t j = 0; j < vars_.size(); ++j)
	{
		if (j == f)
		{
			if (ibase < 0)
			{
				where[j] = static_cast<int>(vars.size());
				vars.push_back(base);
				r.push_back(ranges_[j]);
			}
			continue;
		}
		where[j] = static_cast<int>(vars.size());
		vars.push_back(vars_[j]);
		if (static_cast<int>(j) == ibase)
		{
			try
			{
				r.push_back(convolve(ranges_[f], ranges_[j]));
			}
			catch (SeriesError const &)
			{
				throw SeriesError("subst_exp: unbounded " + from + " support without a declared bound");
			}
		}
		else
			r.push_back(ranges_[j]);
	}
	if (ibase >= 0)
		where[f] = where[static_cast<std::size_t>(ibase)];
	auto iz = vars.size();
	vars.push_back(zvar);
	r.push_back(VarRange{-kInf, z_order, 0, kInf});
	if (vars.size() > kMaxVars)
		throw SeriesError("subst_exp: more than 3 variables");

	std::vector<Scalar> finv;
	for (int j = 0; j <= z_order; ++j)
		finv.push_back(factorial_inv(j));

	Terms t;
	for (auto const &[e, c] : terms_)
	{
		Exponent x{};
		for (std::size_t j = 0; j < vars_.size(); ++j)
			x[static_cast<std::size_t>(where[j])] += e[j];
		Scalar n(static_cast<long>(e[f])), np(1);
		for (int j = 0; j <= z_order; ++j)
		{
			x[iz] = j;
			if (in_box(x, r) && !np.is_zero())
			{
				Scalar v = c * np * finv[static_cast<std::size_t>(j)];
				auto [it, fresh] = t.emplace(x, v);
				if (!fresh)
					it->second += v;
			}
			np *= n;
		}
	}
	Direction d = dir_;
	if (d.kind == Direction::Kind::iota)
	{
		if (ibase < 0)
			std::replace(d.order.begin(), d.order.end(), from, base);
		else
			d.order.erase(std::remove(d.order.begin(), d.order.end(), from), d.order.end());
		d.order.push_back(zvar);
	}
	return TruncatedLaurent(std::move(vars), d, std::move(r), std::move(t));
}

std::string TruncatedLaurent::format_exponent(Exponent const &e) const
{
	std::string s;
	for (std::size_t i = 0; i < vars_.size(); ++i)
	{
		if (e[i] == 0)
			continue;
		if (!s.empty())
			s += ' ';
		s += vars_[i];
		if (e[i] != 1)
			s += "^" + std::to_string(e[i]);
	}
	return s.empty() ? "1" : s;
}

std::string TruncatedLaurent::to_string() const
{
	std::ostringstream os;
	bool first = true;
	for (auto const &[e, c] : terms_)
	{
		if (!first)
			os << " + ";
		first = false;
		std::string cs = c.to_string();
		if (cs.find(' ') != std::string::npos || cs[0] == '-')
			cs = "(" + cs + ")";
		os << cs;
		std::string m = format_exponent(e);
		if (m != "1")
			os << "*" << m;
	}
	if (first)
		os << "0";
	Window w = known_window();
	if (!w.vars.empty())
		os << "  {" << w.to_string() << "}";
	return os.str();
}

TruncatedLaurent series_inverse(TruncatedLaurent const &s, std::optional<long> up_to)
{
	if (s.nvars() != 1)
		throw SeriesError("series_inverse needs a one-variable series");
	VarRange const &r = s.range(0);
	if (s.terms().empty())
		throw SeriesError("series_inverse: zero leading coefficient");
	long v = s.terms().begin()->first[0];
	if (r.lo > -kInf && r.lo > r.slo)
		throw SeriesError("series_inverse: leading coefficient not known");
	long H;
	if (r.hi >= kInf)
	{
		if (!up_to)
			throw SeriesError("series_inverse: exact input needs an explicit order");
		H = *up_to;
	}
	else
	{
		H = r.hi - 2 * v;
		if (up_to)
			H = std::min(H, *up_to);
	}
	long K = H + v;
	std::vector<Scalar> a, b;
	for (long i = 0; i <= K; ++i)
		a.push_back(s.coeff(Exponent{static_cast<int>(v + i), 0, 0}));
	Scalar inv0 = a[0].inv();
	TruncatedLaurent::Terms t;
	for (long k = 0; k <= K; ++k)
	{
		Scalar acc;
		if (k == 0)
			acc = inv0;
		else
		{
			for (long i = 1; i <= k; ++i)
				if (!a[static_cast<std::size_t>(i)].is_zero())
					acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(k - i)];
			acc = -acc * inv0;
		}
		b.push_back(acc);
		if (!acc.is_zero())
			t[Exponent{static_cast<int>(k - v), 0, 0}] = acc;
	}
	return TruncatedLaurent(s.vars(), s.direction(), {VarRange{-kInf, H, -v, kInf}}, std::move(t));
}

TruncatedLaurent delta_family(DeltaKind kind, Scalar const &c, Window const &w)
{
	if (c.is_zero())
		throw DomainError("delta_family: c must be nonzero");
	if (w.size() != 2)
		throw SeriesError("delta_family: window must name two variables");
	for (std::size_t i = 0; i < 2; ++i)
		if (w.lo[i] <= -kInf || w.hi[i] >= kInf)
			throw SeriesError("delta_family: window must be finite");
	// exponents (-k - s, k - s) with s = 1 for dshift, 0 otherwise
	int s = kind == DeltaKind::dshift ? 1 : 0;
	long kmin = std::max(w.lo[1] + s, -w.hi[0] - s), kmax = std::min(w.hi[1] + s, -w.lo[0] - s);
	TruncatedLaurent::Terms t;
	for (long k = kmin; k <= kmax; ++k)
	{
		Scalar v;
		auto ki = static_cast<int>(k);
		switch (kind)
		{
		case DeltaKind::plain:
			v = c.pow(ki);
			break;
		case DeltaKind::euler:
			v = Scalar(k) * c.pow(ki);
			break;
		case DeltaKind::dshift:
			v = Scalar(k) * c.pow(ki - 1);
			break;
		}
		if (!v.is_zero())
			t[Exponent{-ki - s, ki - s, 0}] = v;
	}
	std::vector<VarRange> r{{w.lo[0], w.hi[0], -kInf, kInf}, {w.lo[1], w.hi[1], -kInf, kInf}};
	return TruncatedLaurent(w.vars, Direction::distribution(), std::move(r), std::move(t));
}

Report assert_equal_on(TruncatedLaurent const &a0, TruncatedLaurent const &b0, Window const &w)
{
	auto vars = union_vars(a0.vars(), b0.vars());
	TruncatedLaurent a = a0.with_vars(vars), b = b0.with_vars(vars);
	std::vector<long> lo(vars.size()), hi(vars.size());
	for (std::size_t i = 0; i < vars.size(); ++i)
	{
		int k = w.index(vars[i]);
		lo[i] = std::max({a.range(i).lo, b.range(i).lo, k >= 0 ? w.lo[static_cast<std::size_t>(k)] : -kInf});
		hi[i] = std::min({a.range(i).hi, b.range(i).hi, k >= 0 ? w.hi[static_cast<std::size_t>(k)] : kInf});
	}
	Window checked(vars, lo, hi);
	Report rep;
	rep.window = checked.to_string();
	if (checked.empty())
	{
		rep.window_empty = true;
		rep.message = "empty guaranteed intersection";
		return rep.finish();
	}
	auto inside = [&](Exponent const &e) {
		for (std::size_t i = 0; i < vars.size(); ++i)
			if (e[i] < lo[i] || e[i] > hi[i])
				return false;
		return true;
	};
	std::map<Exponent, std::pair<Scalar, Scalar>> cells;
	for (auto const &[e, c] : a.terms())
		if (inside(e))
			cells[e].first = c;
	for (auto const &[e, c] : b.terms())
		if (inside(e))
			cells[e].second = c;
	for (auto const &[e, p] : cells)
		rep.expect_equal(a.format_exponent(e), p.first, p.second);
	// count the cells of the box when finite, so an all-zero match still counts
	bool finite = true;
	std::size_t n = 1;
	for (std::size_t i = 0; i < vars.size(); ++i)
	{
		if (lo[i] <= -kInf || hi[i] >= kInf)
			finite = false;
		else
			n *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
	}
	rep.checked = std::max<std::size_t>(finite ? n : cells.size(), 1);
	return rep.finish();
}

} // namespace qheis
