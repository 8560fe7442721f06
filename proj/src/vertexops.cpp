#include "qheis/vertexops.hpp"

#include "qheis/error.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

namespace qheis {

namespace {

Scalar inv_factorial(long k)
{
	mpz_class f = 1;
	for (long i = 2; i <= k; ++i)
		f *= i;
	return Scalar(mpq_class(1, f));
}

Scalar int_pow(long base, long k)
{
	mpz_class r;
	mpz_pow_ui(r.get_mpz_t(), mpz_class(base).get_mpz_t(), static_cast<unsigned long>(k));
	return Scalar(r);
}

std::vector<Scalar> poly_mul(std::vector<Scalar> const &a, std::vector<Scalar> const &b)
{
	std::vector<Scalar> r(a.size() + b.size() - 1);
	for (std::size_t i = 0; i < a.size(); ++i)
		for (std::size_t j = 0; j < b.size(); ++j)
			r[i + j] += a[i] * b[j];
	while (r.size() > 1 && r.back().is_zero())
		r.pop_back();
	return r;
}

bool is_bhat(ModulePtr const &m) { return m->tag() == AlgebraTag::Bhat; }

} // namespace

// ---- Weight ---------------------------------------------------------------

Scalar Weight::at(long e) const
{
	Scalar p;
	Scalar ek(1);
	for (std::size_t k = 0; k < poly.size(); ++k)
	{
		if (!poly[k].is_zero())
			p += poly[k] * ek;
		ek *= Scalar(e);
	}
	if (p.is_zero() || scale == Scalar(1))
		return p;
	return p * scale.pow(static_cast<int>(e));
}

Weight Weight::shifted(int k) const
{
	// scale^{e+k} poly(e+k) = scale^e * (scale^k poly(e+k))
	std::vector<Scalar> r(poly.size());
	for (std::size_t a = 0; a < poly.size(); ++a)
		for (std::size_t b = 0; b <= a; ++b)
		{
			// (e+k)^a = sum_b C(a,b) e^b k^{a-b}
			r[b] += poly[a] * Scalar(binomial(static_cast<long>(a), static_cast<long>(b))) * int_pow(k, static_cast<long>(a - b));
		}
	Weight w;
	w.scale = scale;
	Scalar sk = scale.pow(k);
	for (auto &c : r)
		c *= sk;
	w.poly = std::move(r);
	return w;
}

Weight Weight::times_poly(std::vector<Scalar> const &p) const
{
	Weight w = *this;
	w.poly = poly_mul(poly, p);
	return w;
}

Weight operator*(Weight const &a, Weight const &b)
{
	Weight w;
	w.scale = a.scale * b.scale;
	w.poly = poly_mul(a.poly, b.poly);
	return w;
}

// ---- Multiplier -----------------------------------------------------------

Multiplier::Multiplier(Terms t)
{
	for (auto &[k, c] : t)
		if (!c.is_zero())
			t_.emplace(k, std::move(c));
}

Multiplier Multiplier::parse(std::string const &text) { return from_kernel(RationalKernel::parse(text)); }

Multiplier Multiplier::from_kernel(RationalKernel const &k)
{
	if (!k.denominator().empty())
		throw DomainError("multiplier must be a polynomial in x1, x2: " + k.to_string());
	auto const &names = kernel_var_names();
	int i1 = static_cast<int>(std::find(names.begin(), names.end(), "x1") - names.begin());
	int i2 = static_cast<int>(std::find(names.begin(), names.end(), "x2") - names.begin());
	Terms t;
	for (auto const &[m, c] : k.numerator())
	{
		for (int i = 0; i < kKernelVars; ++i)
		{
			if (m.epow[static_cast<std::size_t>(i)] != 0 || ((i != i1 && i != i2) && m.pow[static_cast<std::size_t>(i)] != 0))
				throw DomainError("multiplier may only use x1 and x2: " + k.to_string());
		}
		int a = m.pow[static_cast<std::size_t>(i1)], b = m.pow[static_cast<std::size_t>(i2)];
		if (a < 0 || b < 0)
			throw DomainError("multiplier must be a polynomial (no negative powers): " + k.to_string());
		t[{a, b}] += c;
	}
	return Multiplier(std::move(t));
}

Multiplier Multiplier::linear(Scalar const &c) { return Multiplier(Terms{{{1, 0}, Scalar(1)}, {{0, 1}, -c}}); }

bool Multiplier::homogeneous() const
{
	if (t_.empty())
		return false;
	int d = t_.begin()->first.first + t_.begin()->first.second;
	return std::all_of(t_.begin(), t_.end(), [d](auto const &kv) { return kv.first.first + kv.first.second == d; });
}

int Multiplier::degree() const
{
	int d = 0;
	for (auto const &[k, c] : t_)
		d = std::max(d, k.first + k.second);
	return d;
}

int Multiplier::min_x1() const
{
	int m = 1 << 30;
	for (auto const &[k, c] : t_)
		m = std::min(m, k.first);
	return m;
}

int Multiplier::min_x2() const
{
	int m = 1 << 30;
	for (auto const &[k, c] : t_)
		m = std::min(m, k.second);
	return m;
}

Multiplier operator*(Multiplier const &a, Multiplier const &b)
{
	Multiplier::Terms t;
	for (auto const &[x, c] : a.t_)
		for (auto const &[y, d] : b.t_)
			t[{x.first + y.first, x.second + y.second}] += c * d;
	return Multiplier(std::move(t));
}

Multiplier Multiplier::pow(int k) const
{
	Multiplier r = one();
	for (int i = 0; i < k; ++i)
		r = r * *this;
	return r;
}

TruncatedLaurent Multiplier::at_exp(int order) const
{
	TruncatedLaurent acc({"z"});
	acc = acc.restricted(Window({"z"}, {-kInf}, {order}));
	for (auto const &[k, c] : t_)
		acc = acc + c * TruncatedLaurent::exp("z", Scalar(k.first), order);
	return acc;
}

int Multiplier::zero_order_at_one() const
{
	// coefficients of p(x, 1)
	int d = 0;
	for (auto const &[k, c] : t_)
		d = std::max(d, k.first);
	std::vector<Scalar> a(static_cast<std::size_t>(d) + 1);
	for (auto const &[k, c] : t_)
		a[static_cast<std::size_t>(k.first)] += c;
	int order = 0;
	while (a.size() > 1)
	{
		// synthetic division by x - 1
		std::vector<Scalar> b(a.size() - 1);
		Scalar acc;
		for (std::size_t i = a.size(); i-- > 1;)
		{
			acc = acc + a[i];
			b[i - 1] = acc;
		}
		if (!(acc + a[0]).is_zero())
			break;
		a = std::move(b);
		++order;
	}
	return order;
}

std::string Multiplier::to_string() const
{
	if (t_.empty())
		return "0";
	std::string s;
	for (auto it = t_.rbegin(); it != t_.rend(); ++it)
	{
		auto const &[k, c] = *it;
		std::string mono;
		if (k.first)
			mono += "x1" + (k.first > 1 ? "^" + std::to_string(k.first) : "");
		if (k.second)
			mono += (mono.empty() ? "" : "*") + std::string("x2") + (k.second > 1 ? "^" + std::to_string(k.second) : "");
		std::string cs = c.to_string();
		bool simple = c.is_constant();
		if (!s.empty())
		{
			if (simple && cs[0] == '-')
			{
				s += " - ";
				cs = cs.substr(1);
			}
			else
				s += " + ";
		}
		if (mono.empty())
			s += simple ? cs : "(" + cs + ")";
		else if (cs == "1")
			s += mono;
		else if (cs == "-1")
			s += "-" + mono;
		else
			s += (simple ? cs : "(" + cs + ")") + "*" + mono;
	}
	return s;
}

// ---- pair products --------------------------------------------------------

using Numerator = std::vector<std::pair<long, FockVector>>;

class PairProduct
{
public:
	PairProduct(OperatorSeries a, OperatorSeries b, ProductKind kind, Multiplier p)
		: a_(std::move(a)), b_(std::move(b)), kind_(kind), p_(std::move(p))
	{
		if (!p_.homogeneous())
			throw UnsupportedError("multiplier " + p_.to_string() + " is not homogeneous");
		deg_ = p_.degree();
		amin_ = p_.min_x1();
		bmin_ = p_.min_x2();
		kz_ = p_.zero_order_at_one();
		check_regular();
	}

	ProductKind kind() const { return kind_; }
	int degree() const { return deg_; }
	Multiplier const &multiplier() const { return p_; }
	OperatorSeries const &left() const { return a_; }
	OperatorSeries const &right() const { return b_; }

	long lower_total(FockVector const &v) const
	{
		long ia = a_.lower_exponent(v), jb = b_.lower_exponent(v);
		if (ia >= kInf || jb >= kInf)
			return kInf;
		return ia + amin_ + jb + bmin_;
	}

	/// (i, P_{i, T-i} v) for the nonzero entries of p(x1,x) a(x1) b(x) v on the
	/// antidiagonal i + j = T.
	std::shared_ptr<Numerator const> numerator(long T, FockVector const &v) const
	{
		auto key = std::make_pair(T, v.to_string());
		{
			std::lock_guard lock(mu_);
			auto it = cache_.find(key);
			if (it != cache_.end())
				return it->second;
		}
		auto out = std::make_shared<Numerator>();
		long i0 = a_.lower_exponent(v) + amin_, j0 = b_.lower_exponent(v) + bmin_;
		std::map<long, FockVector> bv;
		auto bcoef = [&](long j) -> FockVector const & {
			auto it = bv.find(j);
			if (it == bv.end())
				it = bv.emplace(j, b_.coeff(j, v)).first;
			return it->second;
		};
		for (long i = i0; i <= T - j0; ++i)
		{
			long j = T - i;
			FockVector acc(v.module());
			for (auto const &[k, c] : p_.terms())
			{
				FockVector const &w = bcoef(j - k.second);
				if (w.is_zero())
					continue;
				acc += c * a_.coeff(i - k.first, w);
			}
			if (!acc.is_zero())
				out->emplace_back(i, std::move(acc));
		}
		std::lock_guard lock(mu_);
		return cache_.emplace(key, std::move(out)).first->second;
	}

	/// Coefficient of z^N in iota(1/p(e^z, 1)) e^{i z}.
	Scalar phi_weight(long N, long i) const
	{
		if (N < -kz_)
			return Scalar();
		{
			std::lock_guard lock(mu_);
			auto it = weights_.find({N, i});
			if (it != weights_.end())
				return it->second;
		}
		auto const g = inverse(N);
		Scalar acc;
		for (long t = -kz_; t <= N; ++t)
		{
			Scalar gt = g->coeff(Exponent{static_cast<int>(t), 0, 0});
			if (gt.is_zero())
				continue;
			acc += gt * int_pow(i, N - t) * inv_factorial(N - t);
		}
		std::lock_guard lock(mu_);
		weights_.emplace(std::make_pair(N, i), acc);
		return acc;
	}

private:
	std::shared_ptr<TruncatedLaurent const> inverse(long N) const
	{
		std::lock_guard lock(mu_);
		if (ginv_ && ginv_->range(0).hi >= N)
			return ginv_;
		for (long order = N + 2 * kz_ + 4;; order += 4)
		{
			auto inv = series_inverse(p_.at_exp(static_cast<int>(order)));
			if (inv.range(0).hi >= N)
			{
				ginv_ = std::make_shared<TruncatedLaurent const>(std::move(inv));
				return ginv_;
			}
		}
	}

	// Below the vacuum threshold I* every A-mode is an annihilator, so
	// p a(x1) b(x) v equals p [a(x1), b(x)] v there. That scalar part is an
	// exponential polynomial in i of order at most `run`; vanishing on `run`
	// consecutive antidiagonal rows proves it vanishes on all of them.
	void check_regular() const
	{
		ModulePtr const &mod = a_.module();
		FockVector vac = FockVector::vacuum(mod);
		long ia = a_.lower_exponent(vac);
		if (ia >= kInf || b_.lower_exponent(vac) >= kInf)
			return;
		long istar = ia + amin_;
		int dA = 0, dB = 0;
		for (auto const &t : a_.linear_terms())
			dA = std::max(dA, t.weight.degree());
		for (auto const &t : b_.linear_terms())
			dB = std::max(dB, t.weight.degree());
		long run = 3L * static_cast<long>(a_.linear_terms().size() * b_.linear_terms().size()) * (dA + dB + 2) + 8;
		int off = a_.offset();
		int pshift = is_bhat(mod) ? 1 : 0;
		for (long i = istar - run; i < istar; ++i)
		{
			std::map<long, Scalar> row;
			for (auto const &[k, c] : p_.terms())
			{
				long ea = i - k.first;
				for (auto const &ta : a_.linear_terms())
				{
					long ma = -(ea + ta.sigma) - off;
					if (ma < 0)
						throw Error("truncation check reached a creation mode");
					Scalar wa = ta.weight.at(ea);
					if (wa.is_zero())
						continue;
					long nb = -ma - pshift;
					for (auto const &tb : b_.linear_terms())
					{
						long eb = -nb - tb.sigma - off;
						Scalar br = mod->alg.bracket(ta.shift, static_cast<int>(ma), tb.shift, static_cast<int>(nb));
						if (br.is_zero())
							continue;
						row[eb + k.second] += c * wa * tb.weight.at(eb) * mod->level * br;
					}
				}
			}
			for (auto const &[j, val] : row)
				if (!val.is_zero())
					throw UnsupportedError("multiplier " + p_.to_string() + " does not regularize " + a_.name() + " x " + b_.name() +
					                       " (nonzero at x1^" + std::to_string(i) + " x2^" + std::to_string(j) + ")");
		}
	}

	OperatorSeries a_, b_;
	ProductKind kind_;
	Multiplier p_;
	int deg_ = 0, amin_ = 0, bmin_ = 0, kz_ = 0;
	mutable std::mutex mu_;
	mutable std::map<std::pair<long, std::string>, std::shared_ptr<Numerator const>> cache_;
	mutable std::shared_ptr<TruncatedLaurent const> ginv_;
	mutable std::map<std::pair<long, long>, Scalar> weights_;
};

namespace {

std::string signature(OperatorSeries const &s)
{
	std::ostringstream o;
	o << s.module().get() << "|" << s.unit().to_string();
	for (auto const &t : s.linear_terms())
	{
		o << "|" << t.shift << "," << t.sigma << "," << t.weight.scale.to_string();
		for (auto const &c : t.weight.poly)
			o << "," << c.to_string();
	}
	return o.str();
}

struct PairCache
{
	std::mutex mu;
	std::map<std::string, std::shared_ptr<PairProduct const>> pairs;
};

PairCache &pair_cache()
{
	static PairCache c;
	return c;
}

std::shared_ptr<PairProduct const> get_pair(OperatorSeries const &a, OperatorSeries const &b, ProductKind kind, Multiplier const &p)
{
	std::string key = mode_key() + "#" + std::to_string(static_cast<int>(kind)) + "#" + p.to_string() + "#" + signature(a) + "#" + signature(b);
	auto &c = pair_cache();
	{
		std::lock_guard lock(c.mu);
		auto it = c.pairs.find(key);
		if (it != c.pairs.end())
			return it->second;
	}
	auto pp = std::make_shared<PairProduct const>(a, b, kind, p);
	std::lock_guard lock(c.mu);
	return c.pairs.emplace(key, pp).first->second;
}

// Multiplier killing the delta terms of [a(x1), b(x2)] for linear a, b.
Multiplier auto_multiplier(OperatorSeries const &a, OperatorSeries const &b)
{
	std::vector<std::pair<Scalar, int>> factors;
	auto need = [&](Scalar const &c, int m) {
		for (auto &f : factors)
			if (f.first == c)
			{
				f.second = std::max(f.second, m);
				return;
			}
		factors.emplace_back(c, m);
	};
	Scalar q = Scalar::q();
	AlgebraTag tag = a.module()->tag();
	for (auto const &ta : a.linear_terms())
		for (auto const &tb : b.linear_terms())
		{
			int extra = ta.weight.degree() + tb.weight.degree();
			Scalar ratio = tb.weight.scale / ta.weight.scale;
			switch (tag)
			{
			case AlgebraTag::Hq:
				need(ratio * q, 1 + extra);
				need(ratio / q, 1 + extra);
				break;
			case AlgebraTag::HtildeQ:
				need(ratio, 2 + extra);
				need(ratio * q, 2 + extra);
				break;
			default:
				need(Scalar(1), 2 + extra);
				break;
			}
		}
	Multiplier p = Multiplier::one();
	for (auto const &[c, m] : factors)
		p = p * Multiplier::linear(c).pow(m);
	return p;
}

OperatorSeries linear_part(OperatorSeries const &s)
{
	return OperatorSeries(s.module(), Scalar(), s.linear_terms(), {}, s.name());
}

std::string paren(std::string const &s) { return "(" + s + ")"; }

std::vector<OperatorSeries> products(OperatorSeries const &a, OperatorSeries const &b, ProductKind kind, int lo, int hi, std::optional<Multiplier> p)
{
	if (a.module() != b.module())
		throw DomainError("product of series on different modules");
	if (!a.is_linear() || !b.is_linear())
		throw UnsupportedError("product operands must be linear series (degree <= 2 states): " + a.name() + ", " + b.name());
	ModulePtr const &mod = a.module();
	std::shared_ptr<PairProduct const> pair;
	if (!a.linear_terms().empty() && !b.linear_terms().empty())
	{
		OperatorSeries al = linear_part(a), bl = linear_part(b);
		if (kind == ProductKind::phi)
			pair = get_pair(al, bl, kind, p ? *p : auto_multiplier(al, bl));
		else
		{
			std::string why;
			for (int k = 0; k <= 8 && !pair; ++k)
			{
				try
				{
					pair = get_pair(al, bl, kind, Multiplier::linear(Scalar(1)).pow(k));
				}
				catch (UnsupportedError const &e)
				{
					why = e.what();
				}
			}
			if (!pair)
				throw UnsupportedError("no locality order k <= 8 for " + a.name() + ", " + b.name() + ": " + why);
		}
	}
	std::vector<OperatorSeries> out;
	for (int n = lo; n <= hi; ++n)
	{
		Scalar unit;
		std::vector<LinearTerm> lin;
		std::vector<ProductTerm> prods;
		if (n == -1)
		{
			unit = a.unit() * b.unit();
			if (!a.unit().is_zero())
				for (auto t : b.linear_terms())
				{
					t.weight = t.weight.times_poly({a.unit()});
					lin.push_back(std::move(t));
				}
		}
		if (!b.unit().is_zero() && n <= -1)
		{
			long k = -n - 1;
			for (auto t : a.linear_terms())
			{
				if (kind == ProductKind::phi)
				{
					// a(x e^z): z^k carries e^k / k!
					std::vector<Scalar> pk(static_cast<std::size_t>(k) + 1);
					pk[static_cast<std::size_t>(k)] = inv_factorial(k) * b.unit();
					t.weight = t.weight.times_poly(pk);
				}
				else
				{
					// a(x + z): z^k carries C(e + k, k) a_(e+k)
					std::vector<Scalar> pk{inv_factorial(k) * b.unit()};
					for (long j = 1; j <= k; ++j)
						pk = poly_mul(pk, {Scalar(j), Scalar(1)});
					t.weight = t.weight.shifted(static_cast<int>(k)).times_poly(pk);
					t.sigma += static_cast<int>(k);
				}
				lin.push_back(std::move(t));
			}
		}
		if (pair)
			prods.push_back(ProductTerm{Scalar(1), pair, n, Scalar(1)});
		std::string nm = paren(a.name()) + (kind == ProductKind::phi ? "^e_{" : "_{") + std::to_string(n) + "}" + paren(b.name());
		out.emplace_back(mod, std::move(unit), std::move(lin), std::move(prods), std::move(nm));
	}
	return out;
}

} // namespace

void clear_product_caches()
{
	auto &c = pair_cache();
	std::lock_guard lock(c.mu);
	c.pairs.clear();
}

// ---- OperatorSeries -------------------------------------------------------

OperatorSeries::OperatorSeries(ModulePtr m) : mod_(std::move(m)), name_("0") {}

OperatorSeries::OperatorSeries(ModulePtr m, Scalar unit, std::vector<LinearTerm> lin, std::vector<ProductTerm> prods, std::string name)
	: mod_(std::move(m)), unit_(std::move(unit)), lin_(std::move(lin)), prods_(std::move(prods)), name_(std::move(name))
{
}

OperatorSeries OperatorSeries::identity(ModulePtr m) { return OperatorSeries(std::move(m), Scalar(1), {}, {}, "1_W"); }

int OperatorSeries::offset() const { return mode_offset(mod_->tag()); }

FockVector OperatorSeries::coeff(long e, FockVector const &v) const
{
	if (v.module() != mod_)
		throw DomainError("series applied to a vector of another module");
	FockVector out(mod_);
	if (v.is_zero())
		return out;
	if (e == 0 && !unit_.is_zero())
		out += unit_ * v;
	int off = offset();
	if (!lin_.empty())
	{
		int N = qheis::annihilation_bound(v);
		for (auto const &t : lin_)
		{
			long m = -(e + t.sigma) - off;
			if (m >= N)
				continue;
			Scalar w = t.weight.at(e);
			if (w.is_zero())
				continue;
			out += w * apply_generator(Generator{mod_->tag(), t.shift, static_cast<int>(m), false}, v);
		}
	}
	for (auto const &pt : prods_)
	{
		PairProduct const &pp = *pt.pair;
		FockVector acc(mod_);
		switch (pp.kind())
		{
		case ProductKind::phi:
		{
			long N = -static_cast<long>(pt.n) - 1;
			for (auto const &[i, P] : *pp.numerator(e + pp.degree(), v))
			{
				Scalar w = pp.phi_weight(N, i);
				if (!w.is_zero())
					acc += w * P;
			}
			break;
		}
		case ProductKind::ordinary:
		{
			long t = pp.degree() - pt.n - 1;
			if (t < 0)
				break;
			for (auto const &[i, P] : *pp.numerator(e + t, v))
			{
				mpz_class c = binomial(i, t);
				if (c != 0)
					acc += Scalar(c) * P;
			}
			break;
		}
		case ProductKind::numerator:
			for (auto const &[i, P] : *pp.numerator(e, v))
				acc += int_pow(i, pt.n) * inv_factorial(pt.n) * P;
			break;
		}
		Scalar c = pt.coef;
		if (!(pt.argscale == Scalar(1)))
			c *= pt.argscale.pow(static_cast<int>(e));
		out += c * acc;
	}
	return out;
}

long OperatorSeries::lower_exponent(FockVector const &v) const
{
	long lo = kInf;
	if (v.is_zero())
		return lo;
	if (!unit_.is_zero())
		lo = 0;
	int off = offset();
	if (!lin_.empty())
	{
		long N = qheis::annihilation_bound(v);
		for (auto const &t : lin_)
			lo = std::min(lo, -N - t.sigma - off + 1);
	}
	for (auto const &pt : prods_)
	{
		PairProduct const &pp = *pt.pair;
		long base = pp.lower_total(v);
		if (base >= kInf)
			continue;
		switch (pp.kind())
		{
		case ProductKind::phi:
			lo = std::min(lo, base - pp.degree());
			break;
		case ProductKind::ordinary:
			if (pp.degree() - pt.n - 1 >= 0)
				lo = std::min(lo, base - (pp.degree() - pt.n - 1));
			break;
		case ProductKind::numerator:
			lo = std::min(lo, base);
			break;
		}
	}
	return lo;
}

OperatorSeries OperatorSeries::scaled(Scalar const &c) const
{
	OperatorSeries r = *this;
	for (auto &t : r.lin_)
		t.weight.scale *= c;
	for (auto &p : r.prods_)
		p.argscale *= c;
	r.name_ = name_ + "(" + c.to_string() + " x)";
	return r;
}

OperatorSeries OperatorSeries::derivative() const
{
	if (!is_linear())
		throw UnsupportedError("derivative of a product series");
	OperatorSeries r(mod_, Scalar(), {}, {}, "d/dx " + name_);
	for (auto t : lin_)
	{
		// (e+1) w(e+1) b_{mode(e+1)}
		t.weight = t.weight.shifted(1).times_poly({Scalar(1), Scalar(1)});
		t.sigma += 1;
		r.lin_.push_back(std::move(t));
	}
	return r;
}

OperatorSeries &OperatorSeries::operator+=(OperatorSeries const &o)
{
	if (o.mod_ != mod_)
		throw DomainError("sum of series on different modules");
	unit_ += o.unit_;
	lin_.insert(lin_.end(), o.lin_.begin(), o.lin_.end());
	prods_.insert(prods_.end(), o.prods_.begin(), o.prods_.end());
	name_ = name_ == "0" ? o.name_ : name_ + " + " + o.name_;
	return *this;
}

OperatorSeries operator*(Scalar const &c, OperatorSeries a)
{
	a.unit_ *= c;
	for (auto &t : a.lin_)
		t.weight = t.weight.times_poly({c});
	for (auto &p : a.prods_)
		p.coef *= c;
	if (!(c == Scalar(1)))
		a.name_ = "(" + c.to_string() + ")*" + a.name_;
	return a;
}

// ---- constructors of series ----------------------------------------------

OperatorSeries field_of(ModulePtr m, FieldFamily f)
{
	AlgebraTag tag = m->tag();
	if (f.kind == FieldFamily::Kind::scaled)
	{
		if (mode_offset(tag) != 0)
			throw DomainError("beta_scaled needs an Hq or HtildeQ module, got " + to_string(tag));
		LinearTerm t;
		t.weight.scale = Scalar::qpow(f.r);
		std::string nm = f.r == 0 ? "b(x)" : "b(q^" + std::to_string(f.r) + " x)";
		return OperatorSeries(std::move(m), Scalar(), {t}, {}, nm);
	}
	if (mode_offset(tag) != 1)
		throw DomainError("beta_indexed needs a Bhat, BhatQ or GradedL module, got " + to_string(tag));
	LinearTerm t;
	t.shift = f.r;
	return OperatorSeries(std::move(m), Scalar(), {t}, {}, "b(" + std::to_string(f.r) + ")(x)");
}

OperatorSeries eproduct_n(OperatorSeries const &a, OperatorSeries const &b, int n)
{
	return products(a, b, ProductKind::ordinary, n, n, std::nullopt).front();
}

OperatorSeries phi_product_n(OperatorSeries const &a, OperatorSeries const &b, int n, Multiplier const &p)
{
	return products(a, b, ProductKind::phi, n, n, p).front();
}

OperatorSeries phi_product_n(OperatorSeries const &a, OperatorSeries const &b, int n)
{
	return products(a, b, ProductKind::phi, n, n, std::nullopt).front();
}

std::vector<OperatorSeries> phi_product_range(OperatorSeries const &a, OperatorSeries const &b, int lo, int hi, std::optional<Multiplier> p)
{
	return products(a, b, ProductKind::phi, lo, hi, std::move(p));
}

OperatorSeries phi_numerator(OperatorSeries const &a, OperatorSeries const &b, Multiplier const &p, int t)
{
	if (!a.is_linear() || !b.is_linear() || !a.unit().is_zero() || !b.unit().is_zero())
		throw UnsupportedError("phi_numerator needs generator-type operands");
	auto pair = get_pair(a, b, ProductKind::numerator, p);
	return OperatorSeries(a.module(), Scalar(), {}, {ProductTerm{Scalar(1), pair, t, Scalar(1)}},
	                      "A_" + std::to_string(t) + "[" + a.name() + ", " + b.name() + "]");
}

Multiplier catalog_multiplier(AlgebraTag tag, int r, int s)
{
	int d = s - r;
	Scalar q = Scalar::q();
	switch (tag)
	{
	case AlgebraTag::Hq:
		// (x1 - q^{d+1} x2)(q x1 - q^d x2)
		return Multiplier::linear(Scalar::qpow(d + 1)) * Multiplier(Multiplier::Terms{{{1, 0}, q}, {{0, 1}, -Scalar::qpow(d)}});
	case AlgebraTag::HtildeQ:
		return Multiplier::linear(Scalar::qpow(d)).pow(2) * Multiplier::linear(Scalar::qpow(d + 1)).pow(2);
	default:
		return Multiplier::linear(Scalar(1)).pow(2);
	}
}

namespace {

template <class Step>
OperatorSeries build_from_states(FockVector const &v, ModulePtr target, FieldFamily::Kind kind, Step step)
{
	OperatorSeries acc(target);
	for (auto const &[mono, c] : v.terms())
	{
		if (mono.size() > 2)
			throw UnsupportedError("state of degree " + std::to_string(mono.size()) + " > 2 has no linear-operand product chain");
		OperatorSeries f = OperatorSeries::identity(target);
		for (auto it = mono.rbegin(); it != mono.rend(); ++it)
			f = step(field_of(target, FieldFamily{kind, it->shift}), f, it->mode);
		acc += c * f;
	}
	if (v.is_zero())
		acc.named("0");
	return acc;
}

} // namespace

OperatorSeries psi_map(FockVector const &v, ModulePtr w)
{
	AlgebraTag vt = v.module()->tag(), wt = w->tag();
	bool ok = (vt == AlgebraTag::Bhat && wt == AlgebraTag::Hq) || (vt == AlgebraTag::BhatQ && wt == AlgebraTag::HtildeQ);
	if (!ok)
		throw DomainError("psi_map goes from bhat to hq or from bhatq to htildeq, not " + to_string(vt) + " to " + to_string(wt));
	return build_from_states(v, std::move(w), FieldFamily::Kind::scaled,
	                         [](OperatorSeries const &a, OperatorSeries const &b, int n) { return phi_product_n(a, b, n); });
}

OperatorSeries state_field(FockVector const &v)
{
	AlgebraTag vt = v.module()->tag();
	if (vt != AlgebraTag::Bhat && vt != AlgebraTag::BhatQ)
		throw DomainError("state_field needs a bhat or bhatq module, got " + to_string(vt));
	return build_from_states(v, v.module(), FieldFamily::Kind::indexed,
	                         [](OperatorSeries const &a, OperatorSeries const &b, int n) { return eproduct_n(a, b, n); });
}

FockVector translation(FockVector const &v)
{
	ModulePtr const &m = v.module();
	if (!has_shift(m->tag()))
		throw DomainError("translation is defined on bhat / bhatq modules");
	FockVector out(m);
	FockVector vac = FockVector::vacuum(m);
	for (auto const &[mono, c] : v.terms())
		for (std::size_t i = 0; i < mono.size(); ++i)
		{
			std::vector<Generator> word;
			for (std::size_t j = 0; j < mono.size(); ++j)
				word.push_back(Generator{m->tag(), mono[j].shift, mono[j].mode - (i == j ? 1 : 0), false});
			out += (c * Scalar(-mono[i].mode)) * apply_word(word, vac);
		}
	return out;
}

std::vector<std::pair<long, FockVector>> skew_defect(FockVector const &u, FockVector const &v, int order)
{
	if (u.module() != v.module())
		throw DomainError("skew_defect: states of different modules");
	OperatorSeries yu = state_field(u), yv = state_field(v);
	long lo = std::min(yu.lower_exponent(v), yv.lower_exponent(u));
	std::vector<std::pair<long, FockVector>> out;
	if (lo >= kInf)
		return out;
	std::map<long, FockVector> rev; // coefficient of x^e in Y(v, -x) u
	for (long e = lo; e <= order; ++e)
		rev.emplace(e, (e % 2 == 0 ? Scalar(1) : Scalar(-1)) * yv.coeff(e, u));
	for (long E = lo; E <= order; ++E)
	{
		FockVector d = yu.coeff(E, v);
		for (long k = 0; E - k >= lo; ++k)
		{
			FockVector t = rev.at(E - k);
			for (long j = 0; j < k && !t.is_zero(); ++j)
				t = translation(t);
			d -= inv_factorial(k) * t;
		}
		out.emplace_back(E, std::move(d));
	}
	return out;
}

SKernel extract_s_kernel(int r, int s, int order, Scalar const &level)
{
	ModulePtr V = make_module(AlgebraTag::BhatQ, level);
	FockVector u = FockVector::basis(V, {Letter{-1, r}}), v = FockVector::basis(V, {Letter{-1, s}});
	auto defect = skew_defect(u, v, order);
	FockVector vac = FockVector::vacuum(V);
	TruncatedLaurent::Terms terms;
	long lo = defect.empty() ? 0 : defect.front().first;
	for (auto const &[e, d] : defect)
	{
		Scalar c = d.coeff({});
		if (!(d - c * vac).is_zero())
			throw DomainError("S-kernel matching inconsistent at x^" + std::to_string(e) + ": defect " + d.to_string() + " is not a multiple of |0>");
		// the defect is g(-x)
		if (!c.is_zero())
			terms[Exponent{static_cast<int>(e), 0, 0}] = e % 2 == 0 ? c : -c;
	}
	SKernel k;
	k.r = r;
	k.s = s;
	k.g = TruncatedLaurent({"x"}, Direction::iota({"x"}), {VarRange{-kInf, order, lo, kInf}}, std::move(terms));
	return k;
}

} // namespace qheis
