#include "qheis/fock.hpp"

#include "qheis/error.hpp"

#include <algorithm>
#include <optional>
#include <regex>
#include <sstream>

namespace qheis {

bool FockModule::scalar_mode(int mode) const { return mode == 0 && !has_shift(tag()); }

int FockModule::partner(int n) const { return tag() == AlgebraTag::Bhat ? -n - 1 : -n; }

ModulePtr make_module(AlgebraTag tag, Scalar level, Scalar zero_mode)
{
	return make_module(AlgebraSpec(tag), std::move(level), std::move(zero_mode));
}

ModulePtr make_module(AlgebraSpec alg, Scalar level, Scalar zero_mode)
{
	return std::make_shared<FockModule const>(std::move(alg), std::move(level), std::move(zero_mode));
}

// ---- FockVector -------------------------------------------------------------

FockVector::FockVector(ModulePtr m, Terms t) : mod_(std::move(m))
{
	for (auto &[k, v] : t)
		if (!v.is_zero())
			t_.emplace(k, std::move(v));
}

FockVector FockVector::vacuum(ModulePtr m) { return basis(std::move(m), {}); }

FockVector FockVector::basis(ModulePtr m, PBWMonomial mono)
{
	std::sort(mono.begin(), mono.end());
	FockVector v(std::move(m));
	v.t_.emplace(std::move(mono), Scalar(1));
	return v;
}

Scalar FockVector::coeff(PBWMonomial const &mono) const
{
	auto it = t_.find(mono);
	return it == t_.end() ? Scalar() : it->second;
}

int FockVector::degree() const
{
	int d = -1;
	for (auto const &[m, c] : t_)
	{
		int s = 0;
		for (auto const &l : m)
			s -= l.mode;
		d = std::max(d, s);
	}
	return d;
}

void FockVector::add(PBWMonomial const &m, Scalar const &c)
{
	if (c.is_zero())
		return;
	auto [it, fresh] = t_.emplace(m, c);
	if (fresh)
		return;
	it->second += c;
	if (it->second.is_zero())
		t_.erase(it);
}

FockVector &FockVector::operator+=(FockVector const &o)
{
	for (auto const &[m, c] : o.t_)
		add(m, c);
	return *this;
}

FockVector &FockVector::operator-=(FockVector const &o)
{
	for (auto const &[m, c] : o.t_)
		add(m, -c);
	return *this;
}

FockVector operator*(Scalar const &c, FockVector v)
{
	if (c.is_zero())
	{
		v.t_.clear();
		return v;
	}
	for (auto &[m, x] : v.t_)
		x *= c;
	return v;
}

Scalar FockVector::pair(FockVector const &o) const
{
	Scalar s;
	auto const &small = t_.size() <= o.t_.size() ? t_ : o.t_;
	auto const &big = t_.size() <= o.t_.size() ? o.t_ : t_;
	for (auto const &[m, c] : small)
	{
		auto it = big.find(m);
		if (it != big.end())
			s += c * it->second;
	}
	return s;
}

FockVector FockVector::specialize(RationalPoint const &p) const
{
	Terms t;
	for (auto const &[m, c] : t_)
		t.emplace(m, c.specialize(p));
	return FockVector(mod_, std::move(t));
}

std::string to_string(PBWMonomial const &m, AlgebraTag tag)
{
	std::string s;
	for (auto const &l : m)
	{
		if (!s.empty())
			s += ' ';
		s += Generator{tag, l.shift, l.mode, false}.to_string();
	}
	return s + "|0>";
}

std::string FockVector::to_string() const
{
	if (t_.empty())
		return "0";
	std::string out;
	AlgebraTag tag = mod_->tag();
	// higher degree first, then PBW order
	std::vector<std::pair<PBWMonomial, Scalar>> items(t_.begin(), t_.end());
	auto deg = [](PBWMonomial const &m) {
		int s = 0;
		for (auto const &l : m)
			s -= l.mode;
		return s;
	};
	std::stable_sort(items.begin(), items.end(), [&](auto const &a, auto const &b) { return deg(a.first) > deg(b.first); });
	for (auto const &[m, c] : items)
	{
		std::string cs = c.to_string();
		bool neg = !cs.empty() && cs[0] == '-' && cs.find_first_of(" /", 1) == std::string::npos;
		if (neg)
			cs = cs.substr(1);
		if (!out.empty())
			out += neg ? " - " : " + ";
		else if (neg)
			out += "-";
		if (cs != "1")
		{
			bool simple = cs.find_first_of(" /") == std::string::npos;
			out += simple ? cs : "(" + cs + ")";
			out += '*';
		}
		out += qheis::to_string(m, tag);
	}
	return out;
}

FockVector parse_state(ModulePtr m, std::string const &text)
{
	std::istringstream in(text);
	std::vector<Generator> word;
	std::string tok;
	while (in >> tok)
	{
		if (tok == "1" || tok == "|0>")
			continue;
		word.push_back(parse_generator(m->tag(), tok));
	}
	return apply_word(word, FockVector::vacuum(m));
}

// ---- action ---------------------------------------------------------------

namespace {

using Terms = FockVector::Terms;

void add_to(Terms &t, PBWMonomial const &m, Scalar const &c)
{
	if (c.is_zero())
		return;
	auto [it, fresh] = t.emplace(m, c);
	if (fresh)
		return;
	it->second += c;
	if (it->second.is_zero())
		t.erase(it);
}

Scalar central_bracket(FockModule const &mod, Letter a, Letter b)
{
	return mod.level * mod.alg.bracket(a.shift, a.mode, b.shift, b.mode);
}

// g . (m[i] m[i+1] ... |0>) for a creation g; results are sorted monomials
// (the prefix m[0..i) is prepended by the caller).
void insert_creation(FockModule const &mod, Letter g, PBWMonomial const &m, std::size_t i, PBWMonomial &prefix, Scalar const &coef, Terms &out)
{
	if (i == m.size() || !(m[i] < g))
	{
		PBWMonomial r = prefix;
		r.push_back(g);
		r.insert(r.end(), m.begin() + static_cast<long>(i), m.end());
		add_to(out, r, coef);
		return;
	}
	// g m_i = m_i g + [g, m_i]
	Scalar br = central_bracket(mod, g, m[i]);
	if (!br.is_zero())
	{
		PBWMonomial r = prefix;
		r.insert(r.end(), m.begin() + static_cast<long>(i) + 1, m.end());
		add_to(out, r, coef * br);
	}
	prefix.push_back(m[i]);
	insert_creation(mod, g, m, i + 1, prefix, coef, out);
	prefix.pop_back();
}

} // namespace

FockVector apply_generator(Generator const &g, FockVector const &v)
{
	FockModule const &mod = *v.module();
	if (g.alg != mod.tag())
		throw DomainError("generator of " + to_string(g.alg) + " applied to a " + to_string(mod.tag()) + " module");
	if (g.central)
		return mod.level * v;
	if (mod.scalar_mode(g.mode))
		return mod.zero_mode * v;
	Letter gl{g.mode, g.shift};
	Terms out;
	if (g.mode <= -1)
	{
		PBWMonomial prefix;
		for (auto const &[m, c] : v.terms())
			insert_creation(mod, gl, m, 0, prefix, c, out);
	}
	else
	{
		// annihilator: kills the vacuum, so only the brackets survive
		for (auto const &[m, c] : v.terms())
			for (std::size_t i = 0; i < m.size(); ++i)
			{
				Scalar br = central_bracket(mod, gl, m[i]);
				if (br.is_zero())
					continue;
				PBWMonomial r = m;
				r.erase(r.begin() + static_cast<long>(i));
				add_to(out, r, c * br);
			}
	}
	return FockVector(v.module(), std::move(out));
}

FockVector apply_word(std::vector<Generator> const &word, FockVector const &v)
{
	FockVector r = v;
	for (auto it = word.rbegin(); it != word.rend(); ++it)
		r = apply_generator(*it, r);
	return r;
}

FockVector normal_order(ModulePtr m, std::vector<Generator> const &word, std::mt19937_64 &rng)
{
	FockModule const &mod = *m;
	for (auto const &g : word)
		if (g.alg != mod.tag())
			throw DomainError("generator of " + to_string(g.alg) + " in a word for a " + to_string(mod.tag()) + " module");

	// creations sorted, then annihilators
	auto key = [&](Generator const &g) { return std::make_tuple(g.mode <= -1 ? 0 : 1, g.mode, g.shift); };
	struct Item
	{
		std::vector<Generator> w;
		Scalar c;
	};
	std::vector<Item> work;
	{
		Item it{{}, Scalar(1)};
		for (auto const &g : word)
		{
			if (g.central)
				it.c *= mod.level;
			else
				it.w.push_back(g);
		}
		work.push_back(std::move(it));
	}
	Terms out;
	while (!work.empty())
	{
		Item it = std::move(work.back());
		work.pop_back();
		if (it.c.is_zero())
			continue;
		std::vector<std::size_t> bad;
		for (std::size_t i = 0; i + 1 < it.w.size(); ++i)
			if (key(it.w[i]) > key(it.w[i + 1]))
				bad.push_back(i);
		if (bad.empty())
		{
			PBWMonomial mono;
			Scalar c = it.c;
			for (auto const &g : it.w)
			{
				if (g.mode <= -1)
					mono.push_back({g.mode, g.shift});
				else if (mod.scalar_mode(g.mode))
					c *= mod.zero_mode;
				else
					c = Scalar();
			}
			add_to(out, mono, c);
			continue;
		}
		std::size_t i = bad[std::uniform_int_distribution<std::size_t>(0, bad.size() - 1)(rng)];
		Generator a = it.w[i], b = it.w[i + 1];
		Scalar br = mod.level * mod.alg.bracket(a.shift, a.mode, b.shift, b.mode);
		if (!br.is_zero())
		{
			Item lower{it.w, it.c * br};
			lower.w.erase(lower.w.begin() + static_cast<long>(i), lower.w.begin() + static_cast<long>(i) + 2);
			work.push_back(std::move(lower));
		}
		std::swap(it.w[i], it.w[i + 1]);
		work.push_back(std::move(it));
	}
	return FockVector(m, std::move(out));
}

int annihilation_bound(FockVector const &v)
{
	FockModule const &mod = *v.module();
	int n = 0;
	if (!v.is_zero() && !mod.zero_mode.is_zero() && !has_shift(mod.tag()))
		n = 1;
	for (auto const &[m, c] : v.terms())
		for (auto const &l : m)
			n = std::max(n, mod.partner(l.mode) + 1);
	return n;
}

TruncatedLaurent two_point(FockVector const &bra, std::vector<FieldSpec> const &fields, FockVector const &ket, Window const &w)
{
	if (fields.empty() || fields.size() > kMaxVars || fields.size() != w.size())
		throw DomainError("two_point needs 1 to 3 fields, one per window variable");
	for (std::size_t i = 0; i < w.size(); ++i)
		if (w.lo[i] <= -kInf || w.hi[i] >= kInf)
			throw DomainError("two_point needs a finite window");
	FockModule const &mod = *ket.module();
	AlgebraTag tag = mod.tag();
	int off = mode_offset(tag);
	std::size_t k = fields.size();

	std::vector<VarRange> ranges(k);
	for (std::size_t i = 0; i < k; ++i)
	{
		ranges[i].lo = w.lo[i];
		ranges[i].hi = w.hi[i];
	}
	TruncatedLaurent::Terms terms;
	if (!w.empty())
	{
		auto scale_pow = [&](std::size_t i, long e) { return fields[i].scale.pow(static_cast<int>(e)); };
		Exponent e{};
		for (std::size_t i = 0; i < k; ++i)
			e[i] = static_cast<int>(w.lo[i]);
		// odometer over the box; the innermost field varies fastest so the
		// partial products for outer fields are recomputed only when needed
		std::vector<FockVector> partial(k + 1, ket);
		std::vector<Scalar> pcoef(k + 1, Scalar(1));
		auto refresh = [&](std::size_t from) {
			// recompute partial[i] for i = from .. 0; partial[k] = ket
			for (std::size_t i = from + 1; i-- > 0;)
			{
				int mode = -e[i] - off;
				partial[i] = apply_generator(Generator{tag, fields[i].shift, mode, false}, partial[i + 1]);
				pcoef[i] = pcoef[i + 1] * scale_pow(i, e[i]);
			}
		};
		refresh(k - 1);
		for (;;)
		{
			Scalar c = bra.pair(partial[0]);
			if (!c.is_zero())
				terms.emplace(e, c * pcoef[0]);
			std::size_t i = 0;
			while (i < k && e[i] == w.hi[i])
			{
				e[i] = static_cast<int>(w.lo[i]);
				++i;
			}
			if (i == k)
				break;
			++e[i];
			refresh(i);
		}
	}
	return TruncatedLaurent(w.vars, Direction::iota(w.vars), ranges, std::move(terms));
}

// ---- polynomial realization -------------------------------------------------

PolyState::PolyState(Terms t)
{
	for (auto &[m, c] : t)
		add(m, c);
}

PolyState PolyState::constant(Scalar c)
{
	PolyState p;
	p.add({}, c);
	return p;
}

PolyState PolyState::variable(int shift, int n)
{
	if (n < 1)
		throw DomainError("polynomial variables need index n >= 1");
	PolyState p;
	p.add({{PolyVar{shift, n}, 1}}, Scalar(1));
	return p;
}

void PolyState::add(Monomial const &m, Scalar const &c)
{
	if (c.is_zero())
		return;
	auto [it, fresh] = t_.emplace(m, c);
	if (fresh)
		return;
	it->second += c;
	if (it->second.is_zero())
		t_.erase(it);
}

int PolyState::degree() const
{
	int d = -1;
	for (auto const &[m, c] : t_)
	{
		int s = 0;
		for (auto const &[v, k] : m)
			s += k;
		d = std::max(d, s);
	}
	return d;
}

Scalar PolyState::constant_term() const
{
	auto it = t_.find(Monomial{});
	return it == t_.end() ? Scalar() : it->second;
}

bool PolyState::depends_on(PolyVar v) const
{
	for (auto const &[m, c] : t_)
		if (m.count(v))
			return true;
	return false;
}

PolyState PolyState::derivative(PolyVar v) const
{
	PolyState p;
	for (auto const &[m, c] : t_)
	{
		auto it = m.find(v);
		if (it == m.end())
			continue;
		Monomial r = m;
		int k = it->second;
		if (k == 1)
			r.erase(v);
		else
			r[v] = k - 1;
		p.add(r, Scalar(k) * c);
	}
	return p;
}

PolyState &PolyState::operator+=(PolyState const &o)
{
	for (auto const &[m, c] : o.t_)
		add(m, c);
	return *this;
}

PolyState &PolyState::operator-=(PolyState const &o)
{
	for (auto const &[m, c] : o.t_)
		add(m, -c);
	return *this;
}

PolyState operator*(PolyState const &a, PolyState const &b)
{
	PolyState p;
	for (auto const &[ma, ca] : a.t_)
		for (auto const &[mb, cb] : b.t_)
		{
			PolyState::Monomial m = ma;
			for (auto const &[v, k] : mb)
				m[v] += k;
			p.add(m, ca * cb);
		}
	return p;
}

PolyState operator*(Scalar const &c, PolyState const &p)
{
	PolyState r;
	for (auto const &[m, x] : p.t_)
		r.add(m, c * x);
	return r;
}

std::string PolyState::to_string() const
{
	if (t_.empty())
		return "0";
	std::string out;
	for (auto it = t_.rbegin(); it != t_.rend(); ++it)
	{
		auto const &[m, c] = *it;
		std::string cs = c.to_string();
		bool neg = !cs.empty() && cs[0] == '-' && cs.find_first_of(" /", 1) == std::string::npos;
		if (neg)
			cs = cs.substr(1);
		if (!out.empty())
			out += neg ? " - " : " + ";
		else if (neg)
			out += "-";
		std::string vars;
		for (auto const &[v, k] : m)
		{
			if (!vars.empty())
				vars += '*';
			vars += "x" + std::to_string(v.n) + "(" + std::to_string(v.shift) + ")";
			if (k != 1)
				vars += "^" + std::to_string(k);
		}
		bool simple = cs.find_first_of(" /") == std::string::npos;
		if (vars.empty())
			out += simple ? cs : "(" + cs + ")";
		else if (cs == "1")
			out += vars;
		else
			out += (simple ? cs : "(" + cs + ")") + "*" + vars;
	}
	return out;
}

PolyState poly_apply(int r, int m, PolyState const &p, Scalar const &level)
{
	if (m == 0)
		return PolyState();
	if (m < 0)
		return PolyState::variable(r, -m) * p;
	return (level * Scalar(m)) * (p.derivative({r, m}) - p.derivative({r - 1, m}));
}

Reduction reduce_to_vacuum(PolyState const &p, Scalar const &level)
{
	if (p.is_zero())
		throw DomainError("reduce_to_vacuum: the zero polynomial cannot be reduced");
	if (level.is_zero())
		throw DomainError("level-zero: reduction unavailable");
	Reduction red;
	PolyState cur = p;
	while (cur.degree() > 0)
	{
		// smallest shift among the variables present, then smallest index
		std::optional<PolyVar> best;
		for (auto const &[m, c] : cur.terms())
			for (auto const &[v, k] : m)
				if (!best || v < *best)
					best = v;
		int deg = cur.degree();
		cur = poly_apply(best->shift, best->n, cur, level);
		red.trace.emplace_back(best->shift, best->n);
		if (cur.is_zero() || cur.degree() >= deg)
			throw Error("reduce_to_vacuum: descent failed at " + std::to_string(best->shift) + "," + std::to_string(best->n));
	}
	red.value = cur.constant_term();
	return red;
}

Report realization_bracket_check(int r, int s, int m, int n, std::vector<PolyState> const &samples, Scalar const &level)
{
	Report rep;
	rep.window = "r=" + std::to_string(r) + " s=" + std::to_string(s) + " m=" + std::to_string(m) + " n=" + std::to_string(n) + " samples=" + std::to_string(samples.size());
	Scalar k = graded_leading_constant(r, s, m, n) * level;
	for (std::size_t i = 0; i < samples.size(); ++i)
	{
		auto const &p = samples[i];
		PolyState lhs = poly_apply(r, m, poly_apply(s, n, p, level), level) - poly_apply(s, n, poly_apply(r, m, p, level), level);
		PolyState rhs = k * p;
		PolyState diff = lhs - rhs;
		std::string tag = "sample " + std::to_string(i);
		if (diff.is_zero())
		{
			rep.checked += std::max<std::size_t>(1, p.terms().size());
			continue;
		}
		for (auto const &[mono, c] : diff.terms())
		{
			PolyState one{PolyState::Terms{{mono, Scalar(1)}}};
			Scalar want, got;
			auto it = rhs.terms().find(mono);
			if (it != rhs.terms().end())
				want = it->second;
			auto jt = lhs.terms().find(mono);
			if (jt != lhs.terms().end())
				got = jt->second;
			rep.fail(tag + " " + one.to_string(), want, got);
		}
	}
	return rep.finish();
}

PolyState random_poly(std::mt19937_64 &rng, int max_degree, IndexRange shifts, int max_n)
{
	std::uniform_int_distribution<int> nterms(1, 4), deg(0, max_degree), shift(shifts.lo, shifts.hi), idx(1, max_n), coef(-5, 5);
	for (;;)
	{
		PolyState p;
		int t = nterms(rng);
		for (int i = 0; i < t; ++i)
		{
			PolyState m = PolyState::constant(Scalar(coef(rng)));
			int d = deg(rng);
			for (int j = 0; j < d; ++j)
				m = m * PolyState::variable(shift(rng), idx(rng));
			p += m;
		}
		if (!p.is_zero())
			return p;
	}
}

} // namespace qheis
