#include "qheis/liealg.hpp"

#include "qheis/error.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace qheis {

std::string to_string(AlgebraTag t)
{
	switch (t)
	{
	case AlgebraTag::Hq:
		return "hq";
	case AlgebraTag::HtildeQ:
		return "htildeq";
	case AlgebraTag::Bhat:
		return "bhat";
	case AlgebraTag::BhatQ:
		return "bhatq";
	case AlgebraTag::GradedL:
		return "gradedl";
	}
	return "?";
}

AlgebraTag parse_algebra(std::string const &name)
{
	std::string s = name;
	std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
	for (auto t : {AlgebraTag::Hq, AlgebraTag::HtildeQ, AlgebraTag::Bhat, AlgebraTag::BhatQ, AlgebraTag::GradedL})
		if (to_string(t) == s)
			return t;
	throw DomainError("unknown algebra '" + name + "' (expected hq, htildeq, bhat, bhatq or gradedl)");
}

int mode_offset(AlgebraTag t) { return t == AlgebraTag::Hq || t == AlgebraTag::HtildeQ ? 0 : 1; }

bool has_shift(AlgebraTag t) { return mode_offset(t) == 1; }

std::string Generator::to_string() const
{
	if (central)
		return "c";
	if (has_shift(alg))
		return "b(" + std::to_string(shift) + ")_" + std::to_string(mode);
	return "b_" + std::to_string(mode);
}

Generator parse_generator(AlgebraTag alg, std::string const &text)
{
	if (text == "c")
		return Generator::c(alg);
	static std::regex const shifted(R"(b\((-?\d+)\)_(-?\d+))"), plain(R"(b_(-?\d+))");
	std::smatch m;
	if (has_shift(alg) && std::regex_match(text, m, shifted))
		return Generator{alg, std::stoi(m[1]), std::stoi(m[2]), false};
	if (!has_shift(alg) && std::regex_match(text, m, plain))
		return Generator{alg, 0, std::stoi(m[1]), false};
	throw ParseError("malformed generator '" + text + "' for " + to_string(alg) + (has_shift(alg) ? " (expected b(r)_m)" : " (expected b_m)"), 0);
}

Scalar bilinear_form(int r, int s)
{
	int d = (r == s + 1 ? 1 : 0) - (r == s - 1 ? 1 : 0);
	if (d == 0)
		return Scalar();
	Scalar q = Scalar::q();
	return Scalar(d) / (q - q.inv());
}

namespace {

// a e^x / (1 - a e^x)^2 through x^order
TruncatedLaurent g_series(Scalar const &a, int order)
{
	for (int pad = 4;; pad *= 2)
	{
		auto e = TruncatedLaurent::exp("x", Scalar(1), order + pad);
		auto den = TruncatedLaurent::constant(Scalar(1)).with_vars({"x"}) - a * e;
		auto inv = series_inverse(den);
		auto g = a * e * inv * inv;
		if (g.range(0).hi >= order)
			return g.restricted(Window({"x"}, {-kInf}, {order}));
	}
}

struct FCache
{
	std::mutex mu;
	std::map<std::pair<std::string, int>, TruncatedLaurent> series; // by (mode, n)
};

FCache &fcache()
{
	static FCache c;
	return c;
}

} // namespace

TruncatedLaurent f_series(int n, int order)
{
	auto &c = fcache();
	{
		std::lock_guard lock(c.mu);
		auto it = c.series.find({mode_key(), n});
		if (it != c.series.end() && it->second.range(0).hi >= order)
			return it->second.restricted(Window({"x"}, {-kInf}, {order}));
	}
	int o = std::max(order, 10);
	auto f = g_series(Scalar::qpow(n + 1), o) - g_series(Scalar::qpow(n - 1), o);
	std::lock_guard lock(c.mu);
	auto &slot = c.series[{mode_key(), n}];
	if (slot.nvars() == 0 || slot.range(0).hi < f.range(0).hi)
		slot = f;
	return slot.restricted(Window({"x"}, {-kInf}, {order}));
}

Scalar f_coefficient(int n, int j)
{
	if (j < -2)
		return Scalar();
	return f_series(n, j).coeff(Exponent{j, 0, 0});
}

AlgebraSpec::AlgebraSpec(AlgebraTag tag) : tag_(tag), cache_(std::make_shared<Cache>()) {}

AlgebraSpec AlgebraSpec::with_f(std::function<Scalar(int, int)> f) const
{
	AlgebraSpec a = *this;
	a.f_ = std::move(f);
	a.cache_ = std::make_shared<Cache>();
	return a;
}

AlgebraSpec AlgebraSpec::with_form(std::function<Scalar(int, int)> form) const
{
	AlgebraSpec a = *this;
	a.form_ = std::move(form);
	a.cache_ = std::make_shared<Cache>();
	return a;
}

Scalar AlgebraSpec::form(int r, int s) const { return form_ ? form_(r, s) : bilinear_form(r, s); }

Scalar AlgebraSpec::f_coeff(int n, int j) const { return f_ ? f_(n, j) : f_coefficient(n, j); }

Scalar AlgebraSpec::bhatq(int d, int m, int n) const
{
	auto key = std::make_tuple(mode_key(), d, m, n);
	{
		std::lock_guard lock(cache_->mu);
		auto it = cache_->values.find(key);
		if (it != cache_->values.end())
			return it->second;
	}
	Scalar v;
	if (m + n == 0)
		v = Scalar(static_cast<long>(((d == 0) ? 1 : 0) - ((d == 1) ? 1 : 0)) * m);
	if (m <= -1)
	{
		// f_d(x1 - x2) expanded in nonnegative powers of x1:
		// (x1 - x2)^j = sum_a C(j, a) x1^a (-x2)^{j-a}
		long a = -m - 1, b = -static_cast<long>(n) - 1, j = a + b;
		if (j >= -2)
		{
			mpz_class bin = binomial(j, a);
			if (bin != 0)
			{
				Scalar term = f_coeff(d, static_cast<int>(j)) * Scalar(bin);
				v += (b % 2 == 0) ? term : -term;
			}
		}
	}
	std::lock_guard lock(cache_->mu);
	return cache_->values.emplace(key, v).first->second;
}

Scalar AlgebraSpec::bracket(int r, int m, int s, int n) const
{
	switch (tag_)
	{
	case AlgebraTag::Hq:
		return m + n == 0 ? qint(m) : Scalar();
	case AlgebraTag::HtildeQ:
		return m + n == 0 ? Scalar(m) * (Scalar(1) - Scalar::qpow(std::abs(m))) : Scalar();
	case AlgebraTag::Bhat:
		return m + n + 1 == 0 ? form(r, s) : Scalar();
	case AlgebraTag::BhatQ:
		return bhatq(r - s, m, n);
	case AlgebraTag::GradedL:
		return graded_closed_form(r, s, m, n);
	}
	return Scalar();
}

Scalar AlgebraSpec::bracket(Generator const &a, Generator const &b) const
{
	if (a.alg != tag_ || b.alg != tag_)
		throw DomainError("cross-algebra bracket: " + to_string(a.alg) + " vs " + to_string(b.alg) + " in " + to_string(tag_));
	if (a.central || b.central)
		return Scalar();
	return bracket(a.shift, a.mode, b.shift, b.mode);
}

Scalar graded_leading_constant(int r, int s, int m, int n)
{
	static AlgebraSpec const bq(AlgebraTag::BhatQ);
	// c lies in filtration degree k exactly when k <= 0, and survives in the
	// graded piece of degree m + n only when m + n = 0
	if (m + n != 0)
		return Scalar();
	return bq.bracket(r, m, s, n);
}

Scalar graded_closed_form(int r, int s, int m, int n)
{
	if (m + n != 0)
		return Scalar();
	long v = 0;
	if (r == s)
		v += m;
	if (r == s - 1)
		v += (std::abs(m) - m) / 2;
	if (r == s + 1)
		v -= (std::abs(m) + m) / 2;
	return Scalar(v);
}

namespace {

std::string tuple_str(int r, int s, int m, int n)
{
	return "r=" + std::to_string(r) + " s=" + std::to_string(s) + " m=" + std::to_string(m) + " n=" + std::to_string(n);
}

IndexRange shift_range(AlgebraSpec const &alg, IndexRange r) { return has_shift(alg.tag()) ? r : IndexRange{0, 0}; }

std::string range_str(IndexRange r, IndexRange m)
{
	return "r,s:[" + std::to_string(r.lo) + "," + std::to_string(r.hi) + "] m,n:[" + std::to_string(m.lo) + "," + std::to_string(m.hi) + "]";
}

} // namespace

Report check_skew_symmetry(AlgebraSpec const &alg, IndexRange r0, IndexRange m)
{
	IndexRange r = shift_range(alg, r0);
	Report rep;
	rep.window = range_str(r, m);
	for (int a = r.lo; a <= r.hi; ++a)
		for (int b = r.lo; b <= r.hi; ++b)
			for (int i = m.lo; i <= m.hi; ++i)
				for (int j = m.lo; j <= m.hi; ++j)
					rep.expect_equal(tuple_str(a, b, i, j), -alg.bracket(b, j, a, i), alg.bracket(a, i, b, j));
	return rep.finish();
}

Report verify_shift_invariance(AlgebraSpec const &alg, int k, IndexRange r0, IndexRange m)
{
	IndexRange r = shift_range(alg, r0);
	Report rep;
	rep.window = range_str(r, m);
	for (int a = r.lo; a <= r.hi; ++a)
		for (int b = r.lo; b <= r.hi; ++b)
			for (int i = m.lo; i <= m.hi; ++i)
				for (int j = m.lo; j <= m.hi; ++j)
					rep.expect_equal(tuple_str(a, b, i, j), alg.bracket(a, i, b, j), alg.bracket(a + k, i, b + k, j));
	return rep.finish();
}

Report check_positive_abelian(AlgebraSpec const &alg, IndexRange r0, IndexRange m)
{
	IndexRange r = shift_range(alg, r0);
	Report rep;
	rep.window = range_str(r, m);
	for (int a = r.lo; a <= r.hi; ++a)
		for (int b = r.lo; b <= r.hi; ++b)
			for (int i = std::max(m.lo, 0); i <= m.hi; ++i)
				for (int j = std::max(m.lo, 0); j <= m.hi; ++j)
					rep.expect_equal(tuple_str(a, b, i, j), Scalar(), alg.bracket(a, i, b, j));
	return rep.finish();
}

Report check_graded_agreement(IndexRange r, IndexRange m)
{
	Report rep;
	rep.window = range_str(r, m) + " n=-m";
	for (int a = r.lo; a <= r.hi; ++a)
		for (int b = r.lo; b <= r.hi; ++b)
			for (int i = m.lo; i <= m.hi; ++i)
				rep.expect_equal(tuple_str(a, b, i, -i), graded_closed_form(a, b, i, -i), graded_leading_constant(a, b, i, -i));
	return rep.finish();
}

int form_rank(int lo, int hi)
{
	int n = hi - lo + 1;
	if (n <= 0)
		return 0;
	std::vector<std::vector<Scalar>> a(static_cast<std::size_t>(n), std::vector<Scalar>(static_cast<std::size_t>(n)));
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j)
			a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = bilinear_form(lo + i, lo + j);
	int rank = 0;
	auto N = static_cast<std::size_t>(n);
	for (std::size_t col = 0; col < N && static_cast<std::size_t>(rank) < N; ++col)
	{
		auto R = static_cast<std::size_t>(rank);
		std::size_t piv = R;
		while (piv < N && a[piv][col].is_zero())
			++piv;
		if (piv == N)
			continue;
		std::swap(a[piv], a[R]);
		Scalar inv = a[R][col].inv();
		for (std::size_t i = R + 1; i < N; ++i)
		{
			if (a[i][col].is_zero())
				continue;
			Scalar f = a[i][col] * inv;
			for (std::size_t j = col; j < N; ++j)
				a[i][j] -= f * a[R][j];
		}
		++rank;
	}
	return rank;
}

} // namespace qheis
