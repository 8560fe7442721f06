#include "qheis/kernel.hpp"

#include "qheis/error.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace qheis {

std::array<std::string, kKernelVars> const &kernel_var_names()
{
	static std::array<std::string, kKernelVars> const names{"x", "x0", "x1", "x2", "z"};
	return names;
}

bool KMono::is_one() const
{
	for (int i = 0; i < kKernelVars; ++i)
		if (pow[static_cast<std::size_t>(i)] || epow[static_cast<std::size_t>(i)])
			return false;
	return true;
}

bool operator<(Binomial const &a, Binomial const &b)
{
	if (a.mu != b.mu)
		return a.mu < b.mu;
	return a.c.to_string() < b.c.to_string();
}

namespace {

KMono mono_mul(KMono a, KMono const &b)
{
	for (std::size_t i = 0; i < kKernelVars; ++i)
	{
		a.pow[i] += b.pow[i];
		a.epow[i] += b.epow[i];
	}
	return a;
}

KMono mono_inv(KMono a)
{
	for (std::size_t i = 0; i < kKernelVars; ++i)
	{
		a.pow[i] = -a.pow[i];
		a.epow[i] = -a.epow[i];
	}
	return a;
}

void poly_add_to(KPoly &a, KMono const &m, Scalar const &c)
{
	if (c.is_zero())
		return;
	auto [it, fresh] = a.emplace(m, c);
	if (!fresh)
	{
		it->second += c;
		if (it->second.is_zero())
			a.erase(it);
	}
}

KPoly poly_mul(KPoly const &a, KPoly const &b)
{
	KPoly r;
	for (auto const &[ma, ca] : a)
		for (auto const &[mb, cb] : b)
			poly_add_to(r, mono_mul(ma, mb), ca * cb);
	return r;
}

KPoly poly_one() { return KPoly{{KMono{}, Scalar(1)}}; }

KPoly binom_poly(Binomial const &b)
{
	KPoly p = poly_one();
	poly_add_to(p, b.mu, b.c);
	return p;
}

KPoly poly_pow(KPoly const &p, int k)
{
	KPoly r = poly_one();
	for (int i = 0; i < k; ++i)
		r = poly_mul(r, p);
	return r;
}

// mu allowed and oriented: +x_i, x_i/x_j with i < j, or +e^v
int orientation(KMono const &r)
{
	std::vector<std::size_t> p, e;
	for (std::size_t i = 0; i < kKernelVars; ++i)
	{
		if (r.pow[i])
			p.push_back(i);
		if (r.epow[i])
			e.push_back(i);
	}
	if (e.empty() && p.size() == 1 && std::abs(r.pow[p[0]]) == 1)
		return r.pow[p[0]];
	if (e.empty() && p.size() == 2 && r.pow[p[0]] == -r.pow[p[1]] && std::abs(r.pow[p[0]]) == 1)
		return r.pow[p[0]];
	if (p.empty() && e.size() == 1 && std::abs(r.epow[e[0]]) == 1)
		return r.epow[e[0]];
	return 0;
}

struct Split
{
	KMono pre;
	Scalar pre_c;
	Binomial b;
};

std::optional<Split> as_binomial(KPoly const &n)
{
	if (n.size() != 2)
		return std::nullopt;
	std::pair<KMono, Scalar> t1 = *n.begin(), t2 = *std::next(n.begin());
	KMono r = mono_mul(t2.first, mono_inv(t1.first));
	int o = orientation(r);
	if (o == 0)
		return std::nullopt;
	if (o < 0)
	{
		std::swap(t1, t2);
		r = mono_inv(r);
	}
	return Split{t1.first, t1.second, Binomial{r, t2.second / t1.second}};
}

struct KExpr
{
	KPoly n;
	std::map<Binomial, int> f; // signed multiplicities

	void tidy()
	{
		for (auto it = f.begin(); it != f.end();)
			it = it->second == 0 ? f.erase(it) : std::next(it);
		if (n.empty())
			f.clear();
	}
	void expand_positive()
	{
		for (auto it = f.begin(); it != f.end();)
		{
			if (it->second > 0)
			{
				n = poly_mul(n, poly_pow(binom_poly(it->first), it->second));
				it = f.erase(it);
			}
			else
				++it;
		}
		tidy();
	}
};

KExpr kmul(KExpr a, KExpr const &b)
{
	a.n = poly_mul(a.n, b.n);
	for (auto const &[k, v] : b.f)
		a.f[k] += v;
	a.tidy();
	return a;
}

KExpr kinv(KExpr a, std::size_t pos)
{
	if (a.n.empty())
		throw ParseError("division by zero", pos);
	KExpr r;
	if (a.n.size() == 1)
	{
		auto const &[m, c] = *a.n.begin();
		r.n[mono_inv(m)] = c.inv();
	}
	else if (auto s = as_binomial(a.n))
	{
		r.n[mono_inv(s->pre)] = s->pre_c.inv();
		r.f[s->b] = -1;
	}
	else
		throw ParseError("denominator is not an allowed shape (monomial times x_i - c*x_j, 1 - c*x_i/x_j, x_i - c or e^v - c)", pos);
	for (auto const &[k, v] : a.f)
		r.f[k] -= v;
	r.tidy();
	return r;
}

KExpr kpow(KExpr a, int k, std::size_t pos)
{
	if (k < 0)
		return kpow(kinv(std::move(a), pos), -k, pos);
	KExpr r;
	if (a.n.size() == 2)
		if (auto s = as_binomial(a.n))
		{
			// keep binomials factored so they can later be divided by
			a.n = KPoly{{s->pre, s->pre_c}};
			a.f[s->b] += 1;
		}
	r.n = poly_pow(a.n, k);
	for (auto const &[b, v] : a.f)
		r.f[b] = v * k;
	r.tidy();
	return r;
}

KExpr kadd(KExpr a, KExpr b)
{
	a.expand_positive();
	b.expand_positive();
	std::map<Binomial, int> common;
	for (auto const &[k, v] : a.f)
		common[k] = std::min(common[k], v);
	for (auto const &[k, v] : b.f)
		common[k] = std::min(common[k], v);
	auto lift = [&](KExpr const &e) {
		KPoly n = e.n;
		for (auto const &[k, v] : common)
		{
			auto it = e.f.find(k);
			int have = it == e.f.end() ? 0 : it->second;
			n = poly_mul(n, poly_pow(binom_poly(k), have - v));
		}
		return n;
	};
	KExpr r;
	r.n = lift(a);
	for (auto const &[m, c] : lift(b))
		poly_add_to(r.n, m, c);
	r.f = common;
	r.tidy();
	return r;
}

KExpr kscalar(Scalar c)
{
	KExpr e;
	if (!c.is_zero())
		e.n[KMono{}] = std::move(c);
	return e;
}

} // namespace

class KernelParser
{
public:
	explicit KernelParser(std::string const &s) : s_(s) {}

	RationalKernel run()
	{
		skip();
		if (i_ == s_.size())
			throw ParseError("empty kernel", 0);
		KExpr e = expr();
		skip();
		if (i_ != s_.size())
			throw ParseError(std::string("unexpected '") + s_[i_] + "'", i_);
		e.expand_positive();
		RationalKernel k;
		k.num_ = std::move(e.n);
		for (auto const &[b, v] : e.f)
			k.den_[b] = -v;
		return k;
	}

private:
	void skip()
	{
		while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
			++i_;
	}
	bool eat(char c)
	{
		skip();
		if (i_ < s_.size() && s_[i_] == c)
		{
			++i_;
			return true;
		}
		return false;
	}

	KExpr expr()
	{
		KExpr e = term();
		for (;;)
		{
			if (eat('+'))
				e = kadd(std::move(e), term());
			else if (eat('-'))
				e = kadd(std::move(e), kmul(kscalar(-1), term()));
			else
				return e;
		}
	}

	KExpr term()
	{
		KExpr e = unary();
		for (;;)
		{
			if (eat('*'))
				e = kmul(std::move(e), unary());
			else if (eat('/'))
			{
				skip();
				std::size_t pos = i_;
				e = kmul(std::move(e), kinv(unary(), pos));
			}
			else
				return e;
		}
	}

	KExpr unary()
	{
		if (eat('-'))
			return kmul(kscalar(-1), unary());
		return power();
	}

	KExpr power()
	{
		skip();
		std::size_t pos = i_;
		KExpr a = atom();
		if (eat('^'))
		{
			int k = integer(true);
			return kpow(std::move(a), k, pos);
		}
		return a;
	}

	int integer(bool allow_sign)
	{
		skip();
		std::size_t start = i_;
		bool neg = false;
		if (allow_sign && i_ < s_.size() && (s_[i_] == '-' || s_[i_] == '+'))
		{
			neg = s_[i_] == '-';
			++i_;
		}
		std::size_t d = i_;
		while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
			++i_;
		if (d == i_)
			throw ParseError("expected an integer", start);
		if (i_ - d > 6)
			throw ParseError("exponent too large", start);
		int v = std::stoi(s_.substr(d, i_ - d));
		return neg ? -v : v;
	}

	std::string ident()
	{
		std::size_t start = i_;
		while (i_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[i_])))
			++i_;
		return s_.substr(start, i_ - start);
	}

	int var_index(std::string const &name) const
	{
		auto const &names = kernel_var_names();
		auto it = std::find(names.begin(), names.end(), name);
		return it == names.end() ? -1 : static_cast<int>(it - names.begin());
	}

	KExpr atom()
	{
		skip();
		std::size_t pos = i_;
		if (i_ >= s_.size())
			throw ParseError("unexpected end of input", pos);
		char c = s_[i_];
		if (c == '(')
		{
			++i_;
			KExpr e = expr();
			if (!eat(')'))
				throw ParseError("expected ')'", i_);
			return e;
		}
		if (std::isdigit(static_cast<unsigned char>(c)))
		{
			std::size_t d = i_;
			while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
				++i_;
			return kscalar(Scalar(mpz_class(s_.substr(d, i_ - d))));
		}
		if (!std::isalpha(static_cast<unsigned char>(c)))
			throw ParseError(std::string("unexpected '") + c + "'", pos);
		std::string id = ident();
		if (id == "q")
			return kscalar(Scalar::q());
		if (id == "l")
			return kscalar(Scalar::level());
		if (id == "e")
		{
			if (!eat('^'))
				throw ParseError("expected '^' after e", i_);
			bool paren = eat('(');
			skip();
			std::size_t vpos = i_;
			int v = var_index(ident());
			if (v < 0)
				throw ParseError("expected a variable after e^", vpos);
			if (paren && !eat(')'))
				throw ParseError("expected ')'", i_);
			KMono m;
			m.epow[static_cast<std::size_t>(v)] = 1;
			return KExpr{KPoly{{m, Scalar(1)}}, {}};
		}
		int v = var_index(id);
		if (v < 0)
			throw ParseError("unknown identifier '" + id + "'", pos);
		KMono m;
		m.pow[static_cast<std::size_t>(v)] = 1;
		return KExpr{KPoly{{m, Scalar(1)}}, {}};
	}

	std::string const &s_;
	std::size_t i_ = 0;
};

RationalKernel RationalKernel::parse(std::string const &text) { return KernelParser(text).run(); }

RationalKernel RationalKernel::constant(Scalar c)
{
	RationalKernel k;
	if (!c.is_zero())
		k.num_[KMono{}] = std::move(c);
	return k;
}

RationalKernel RationalKernel::from_poly(KPoly n)
{
	RationalKernel k;
	for (auto &[m, c] : n)
		if (!c.is_zero())
			k.num_.emplace(m, c);
	return k;
}

std::vector<std::string> RationalKernel::variables() const
{
	std::array<bool, kKernelVars> used{};
	auto mark = [&](KMono const &m) {
		for (std::size_t i = 0; i < kKernelVars; ++i)
			if (m.pow[i] || m.epow[i])
				used[i] = true;
	};
	for (auto const &[m, c] : num_)
		mark(m);
	for (auto const &[b, k] : den_)
		mark(b.mu);
	std::vector<std::string> r;
	for (std::size_t i = 0; i < kKernelVars; ++i)
		if (used[i])
			r.push_back(kernel_var_names()[i]);
	return r;
}

namespace {

std::string mono_string(KMono const &m)
{
	std::string s;
	auto add = [&](std::string const &p) {
		if (!s.empty())
			s += "*";
		s += p;
	};
	for (std::size_t i = 0; i < kKernelVars; ++i)
	{
		std::string const &v = kernel_var_names()[i];
		if (int k = m.pow[i])
			add(k == 1 ? v : v + "^" + std::to_string(k));
		if (int k = m.epow[i])
			add(k == 1 ? "e^" + v : "e^" + v + "^" + std::to_string(k));
	}
	return s;
}

std::string poly_string(KPoly const &p)
{
	if (p.empty())
		return "0";
	std::string out;
	bool first = true;
	// constant term first reads better: iterate in reverse monomial order is
	// arbitrary, so keep map order, which is canonical
	for (auto const &[m, c] : p)
	{
		std::string cs = c.to_string();
		bool simple = cs.find_first_of(" /") == std::string::npos;
		bool neg = simple && cs[0] == '-';
		if (neg)
			cs = cs.substr(1);
		if (!simple)
			cs = "(" + cs + ")";
		std::string ms = mono_string(m);
		std::string body;
		if (ms.empty())
			body = cs;
		else if (cs == "1")
			body = ms;
		else
			body = cs + "*" + ms;
		if (first)
			out += (neg ? "-" : "") + body;
		else
			out += (neg ? " - " : " + ") + body;
		first = false;
	}
	return out;
}

} // namespace

std::string RationalKernel::to_string() const
{
	std::string n = poly_string(num_);
	if (den_.empty())
		return n;
	if (num_.size() > 1)
		n = "(" + n + ")";
	for (auto const &[b, k] : den_)
	{
		n += "/(" + poly_string(binom_poly(b)) + ")";
		if (k != 1)
			n += "^" + std::to_string(k);
	}
	return n;
}

namespace {

std::size_t kernel_index(std::string const &v)
{
	auto const &names = kernel_var_names();
	return static_cast<std::size_t>(std::find(names.begin(), names.end(), v) - names.begin());
}

} // namespace

TruncatedLaurent RationalKernel::iota_expand(std::vector<std::string> const &direction, Window const &w) const
{
	if (direction.empty() || direction.size() > kMaxVars)
		throw SeriesError("direction must name 1 to 3 variables");
	for (std::size_t i = 0; i < direction.size(); ++i)
	{
		if (kernel_index(direction[i]) >= kKernelVars)
			throw SeriesError("direction names unknown variable " + direction[i]);
		for (std::size_t j = 0; j < i; ++j)
			if (direction[i] == direction[j])
				throw SeriesError("direction repeats variable " + direction[i]);
	}
	for (auto const &v : variables())
		if (std::find(direction.begin(), direction.end(), v) == direction.end())
			throw SeriesError("direction does not name kernel variable " + v);
	std::vector<long> lo(direction.size()), hi(direction.size());
	for (std::size_t i = 0; i < direction.size(); ++i)
	{
		int k = w.index(direction[i]);
		if (k < 0)
			throw SeriesError("window does not bound variable " + direction[i]);
		lo[i] = w.lo[static_cast<std::size_t>(k)];
		hi[i] = w.hi[static_cast<std::size_t>(k)];
		if (hi[i] >= kInf)
			throw SeriesError("window upper bound must be finite");
	}
	std::size_t nv = direction.size();
	auto local = [&](std::size_t kernel_i) -> std::size_t {
		return static_cast<std::size_t>(std::find(direction.begin(), direction.end(), kernel_var_names()[kernel_i]) - direction.begin());
	};
	auto to_exp = [&](KMono const &m) {
		Exponent e{};
		for (std::size_t i = 0; i < kKernelVars; ++i)
			if (m.pow[i])
				e[local(i)] = m.pow[i];
		return e;
	};

	Direction tag = den_.empty() ? Direction::polynomial() : Direction::iota(direction);

	auto build = [&](long slack) {
		std::vector<long> T(nv);
		for (std::size_t i = 0; i < nv; ++i)
			T[i] = std::max(hi[i], 0L) + slack;

		TruncatedLaurent num(direction);
		for (auto const &[m, c] : num_)
		{
			TruncatedLaurent t = TruncatedLaurent::monomial(direction, to_exp(m), c);
			for (std::size_t i = 0; i < kKernelVars; ++i)
				if (m.epow[i])
				{
					std::size_t j = local(i);
					t = t * TruncatedLaurent::exp(direction[j], Scalar(static_cast<long>(m.epow[i])), static_cast<int>(T[j]));
				}
			num = num + t;
		}
		TruncatedLaurent acc = num;
		for (auto const &[b, k] : den_)
		{
			TruncatedLaurent inv;
			int ev = -1;
			for (std::size_t i = 0; i < kKernelVars; ++i)
				if (b.mu.epow[i])
					ev = static_cast<int>(i);
			if (ev >= 0)
			{
				std::size_t j = local(static_cast<std::size_t>(ev));
				TruncatedLaurent f = TruncatedLaurent::constant(Scalar(1)).with_vars({direction[j]}) +
				                     b.c * TruncatedLaurent::exp(direction[j], Scalar(1), static_cast<int>(T[j]));
				inv = series_inverse(f);
			}
			else
			{
				Exponent mu = to_exp(b.mu);
				std::size_t dec = nv;
				for (std::size_t i = nv; i-- > 0;)
					if (mu[i] != 0)
					{
						dec = i;
						break;
					}
				int d = mu[dec];
				// 1/(1 + c mu) = sum (-c mu)^n             if mu has positive degree
				//              = (c mu)^-1 sum (-(c mu)^-1)^n otherwise
				Exponent step = mu;
				Scalar ratio = -b.c, lead(1);
				Exponent start{};
				if (d < 0)
				{
					for (auto &x : step)
						x = -x;
					ratio = -b.c.inv();
					lead = b.c.inv();
					start = step;
				}
				long N = T[dec];
				TruncatedLaurent::Terms terms;
				Scalar coef = lead;
				for (long n = 0; n <= N; ++n)
				{
					Exponent e{};
					for (std::size_t i = 0; i < nv; ++i)
						e[i] = start[i] + static_cast<int>(n) * step[i];
					terms[e] = coef;
					coef *= ratio;
				}
				std::vector<VarRange> r(nv);
				for (std::size_t i = 0; i < nv; ++i)
				{
					long s0 = start[i];
					if (step[i] > 0)
						r[i] = VarRange{-kInf, kInf, s0, kInf};
					else if (step[i] < 0)
						r[i] = VarRange{-kInf, kInf, -kInf, s0};
					else
						r[i] = VarRange{-kInf, kInf, s0, s0};
				}
				r[dec].hi = start[dec] + N;
				inv = TruncatedLaurent(direction, Direction::polynomial(), std::move(r), std::move(terms));
			}
			acc = acc * inv.pow(k);
		}
		return acc.retagged(tag);
	};

	for (long slack : {2L, 4L, 8L, 16L, 32L, 64L})
	{
		TruncatedLaurent s = build(slack);
		bool covered = true;
		for (std::size_t i = 0; i < nv; ++i)
			covered = covered && s.range(i).lo <= lo[i] && s.range(i).hi >= hi[i];
		if (covered)
			return s.restricted(Window(direction, lo, hi));
	}
	throw SeriesError("expansion of " + to_string() + " does not reach the requested window");
}

TruncatedLaurent iota_expand(std::string const &kernel, std::vector<std::string> const &direction, Window const &w)
{
	return RationalKernel::parse(kernel).iota_expand(direction, w);
}

} // namespace qheis
