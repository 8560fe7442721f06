#include "qheis/error.hpp"
#include "qheis/kernel.hpp"
#include "qheis/series.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qheis;

namespace {

Scalar const q = Scalar::q();

Exponent ex(int a, int b = 0, int c = 0) { return Exponent{a, b, c}; }

// Power series quotient a/b with plain rationals, b[0] != 0.
std::vector<mpq_class> divide(std::vector<mpq_class> const &a, std::vector<mpq_class> const &b, std::size_t n)
{
	std::vector<mpq_class> r(n);
	for (std::size_t k = 0; k < n; ++k)
	{
		mpq_class acc = k < a.size() ? a[k] : 0;
		for (std::size_t i = 1; i <= k && i < b.size(); ++i)
			acc -= b[i] * r[k - i];
		r[k] = acc / b[0];
	}
	return r;
}

mpq_class inv_fact(int n)
{
	mpz_class f = 1;
	for (int i = 2; i <= n; ++i)
		f *= i;
	return mpq_class(1, f);
}

} // namespace

TEST(Window, Basics)
{
	Window w({"x1", "x2"}, {-2, 0}, {3, 1});
	EXPECT_FALSE(w.empty());
	EXPECT_EQ(w.index("x2"), 1);
	EXPECT_EQ(w.to_string(), "x1:[-2,3] x2:[0,1]");
	EXPECT_THROW(Window({"x", "x"}, {0, 0}, {1, 1}), SeriesError);
	EXPECT_TRUE(Window({"x"}, {2}, {1}).empty());
}

TEST(Iota, GeometricSeries)
{
	Window w = Window::symmetric({"x2", "x1"}, 8);
	auto s = iota_expand("1/(1 - q*x1/x2)", {"x2", "x1"}, w);
	for (int a = -8; a <= 8; ++a)
		for (int b = -8; b <= 8; ++b)
		{
			Scalar want = (a >= 0 && b == -a) ? q.pow(a) : Scalar();
			EXPECT_EQ(s.coeff(ex(b, a)), want) << a << " " << b;
		}
}

TEST(Iota, DerivativeOfGeometric)
{
	Window w = Window::symmetric({"x2", "x1"}, 7);
	auto s = iota_expand("(q*x1/x2)/(1 - q*x1/x2)^2", {"x2", "x1"}, w);
	for (int k = -7; k <= 7; ++k)
		EXPECT_EQ(s.coeff(ex(-k, k)), k >= 1 ? Scalar(k) * q.pow(k) : Scalar()) << k;
	EXPECT_EQ(s.direction(), Direction::iota({"x2", "x1"}));
}

TEST(Iota, ExponentialKernelAgainstDivision)
{
	// e^x/(1-e^x)^2 = e^x / (x^2 (sum_{n>=1} x^{n-1}/n!)^2)
	std::size_t n = 12;
	std::vector<mpq_class> ex_(n), h(n), h2(n, 0);
	for (std::size_t i = 0; i < n; ++i)
	{
		ex_[i] = inv_fact(static_cast<int>(i));
		h[i] = inv_fact(static_cast<int>(i + 1));
	}
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = 0; i + j < n; ++j)
			h2[i + j] += h[i] * h[j];
	auto want = divide(ex_, h2, n);

	auto s = iota_expand("e^x/(1 - e^x)^2", {"x"}, Window({"x"}, {-4}, {8}));
	for (int k = -4; k <= 8; ++k)
	{
		mpq_class w = (k + 2 >= 0) ? want[static_cast<std::size_t>(k + 2)] : mpq_class(0);
		EXPECT_EQ(s.coeff(ex(k)), Scalar(w)) << k;
	}
	EXPECT_EQ(s.coeff(ex(-2)), Scalar(1));
	EXPECT_EQ(s.coeff(ex(0)), Scalar(mpq_class(-1, 12)));
	EXPECT_EQ(s.coeff(ex(2)), Scalar(mpq_class(1, 240)));
}

TEST(Iota, DirectionAsymmetryIsDelta)
{
	Window w = Window::symmetric({"x1", "x2"}, 10);
	auto a = iota_expand("1/(x1 - x2)", {"x1", "x2"}, w);
	auto b = iota_expand("1/(x1 - x2)", {"x2", "x1"}, w);
	EXPECT_THROW((void)(a - b), SeriesError);
	auto diff = a.as_distribution() - b.as_distribution();
	auto delta = delta_family(DeltaKind::plain, Scalar(1), w).shifted(ex(-1, 0));
	auto rep = assert_equal_on(diff, delta, Window::symmetric({"x1", "x2"}, 9));
	EXPECT_TRUE(rep.passed()) << rep.failures.size();
	EXPECT_FALSE(assert_equal_on(a, b, w).passed());
}

TEST(Kernel, RoundTrip)
{
	for (std::string s : {"1/(1 - q*x1/x2)", "(q*x1/x2)/(1 - q*x1/x2)^2", "e^x/(1 - e^x)^2", "x1^-2 + 3*x2",
	                      "(x1 - x)^2/(x1 - x2)", "1/((q - 1)*(x - 2))", "l*q^2/(x2 - q^-1*x1)^3", "(q + 1)/(q*l - 1)"})
	{
		auto k = RationalKernel::parse(s);
		auto printed = k.to_string();
		EXPECT_EQ(RationalKernel::parse(printed), k) << s << " -> " << printed;
		EXPECT_EQ(RationalKernel::parse(printed).to_string(), printed);
	}
}

TEST(Kernel, ShapeErrors)
{
	try
	{
		RationalKernel::parse("1/(x1^2 + x2^2)");
		FAIL();
	}
	catch (ParseError const &e)
	{
		EXPECT_EQ(e.position(), 2u);
	}
	EXPECT_THROW(RationalKernel::parse("1/(x1 + x2 + 1)"), ParseError);
	EXPECT_THROW(RationalKernel::parse("1/(e^z - x)"), ParseError);
	EXPECT_THROW(RationalKernel::parse("1/(x1 - x*e^z)"), ParseError);
	try
	{
		RationalKernel::parse("x1 + y");
		FAIL();
	}
	catch (ParseError const &e)
	{
		EXPECT_EQ(e.position(), 5u);
	}
	EXPECT_THROW(RationalKernel::parse("(x1"), ParseError);
	EXPECT_THROW(RationalKernel::parse(""), ParseError);
}

TEST(Kernel, Cancellation)
{
	auto k = RationalKernel::parse("1/(x1 - x2) + 1/(x2 - x1)");
	EXPECT_TRUE(k.numerator().empty());
	EXPECT_TRUE(k.denominator().empty());
}

TEST(Delta, Families)
{
	Window w = Window::symmetric({"x1", "x2"}, 6);
	auto p = delta_family(DeltaKind::plain, q, w);
	EXPECT_EQ(p.coeff(ex(-3, 3)), q.pow(3));
	EXPECT_EQ(p.coeff(ex(3, -3)), q.pow(-3));
	EXPECT_TRUE(p.coeff(ex(2, 3)).is_zero());
	auto e = delta_family(DeltaKind::euler, Scalar(1), w);
	for (int k = -6; k <= 6; ++k)
		EXPECT_EQ(e.coeff(ex(-k, k)), Scalar(k));
	auto d = delta_family(DeltaKind::dshift, Scalar(1), w);
	for (int k = -5; k <= 5; ++k)
		EXPECT_EQ(d.coeff(ex(-k - 1, k - 1)), Scalar(k));
	EXPECT_THROW(delta_family(DeltaKind::plain, Scalar(0), w), DomainError);
	EXPECT_THROW(p.coeff(ex(7, 0)), SeriesError);
}

TEST(Delta, PolynomialKillsDerivative)
{
	// (x1 - q x2)^2 * d/dx2 (x1^-1 delta(q x2/x1)) = 0
	Window w = Window::symmetric({"x1", "x2"}, 8);
	auto d = delta_family(DeltaKind::dshift, q, w);
	auto p = iota_expand("(x1 - q*x2)^2", {"x1", "x2"}, Window::symmetric({"x1", "x2"}, 3));
	auto prod = p * d;
	EXPECT_TRUE(prod.is_zero());
	auto rep = assert_equal_on(prod, TruncatedLaurent({"x1", "x2"}), w);
	EXPECT_TRUE(rep.passed());
	EXPECT_EQ(rep.window, "x1:[-6,8] x2:[-6,8]");
}

TEST(SubstExp, Examples)
{
	auto x1sq = TruncatedLaurent::monomial({"x1", "x2"}, ex(2, 0));
	auto s = x1sq.subst_exp("x1", "x2", "x0", 3);
	EXPECT_EQ(s.vars(), (std::vector<std::string>{"x2", "x0"}));
	EXPECT_EQ(s.coeff(ex(2, 0)), Scalar(1));
	EXPECT_EQ(s.coeff(ex(2, 1)), Scalar(2));
	EXPECT_EQ(s.coeff(ex(2, 2)), Scalar(2));
	EXPECT_EQ(s.coeff(ex(2, 3)), Scalar(mpq_class(4, 3)));
	EXPECT_THROW(s.coeff(ex(2, 4)), SeriesError);

	auto inv = TruncatedLaurent::monomial({"x1"}, ex(-1)).subst_exp("x1", "x", "z", 1);
	EXPECT_EQ(inv.coeff(ex(-1, 0)), Scalar(1));
	EXPECT_EQ(inv.coeff(ex(-1, 1)), Scalar(-1));
}

TEST(SubstExp, LogarithmicKernelResidue)
{
	// (x1 - x)^2 / (x1 - x e^z), expanded for |x| < |x1|: (x1 - x) + x z + O(z^2)
	Window w({"x1", "x2"}, {-12, 0}, {3, 12});
	auto k = iota_expand("1/(x1 - x2)", {"x1", "x2"}, w);
	auto s = k.subst_exp("x2", "x", "z", 3);
	auto num = iota_expand("(x1 - x)^2", {"x1", "x"}, Window::symmetric({"x1", "x"}, 4));
	auto r = num * s;
	// x1^1 x^0 z^0 -> 1, x1^0 x^1 z^0 -> -1, x1^0 x^1 z^1 -> 1
	EXPECT_EQ(r.coeff(ex(1, 0, 0)), Scalar(1));
	EXPECT_EQ(r.coeff(ex(0, 1, 0)), Scalar(-1));
	EXPECT_EQ(r.coeff(ex(0, 1, 1)), Scalar(1));
	EXPECT_EQ(r.coeff(ex(1, 0, 1)), Scalar(0));
	EXPECT_EQ(r.coeff(ex(-1, 2, 0)), Scalar(0));
	EXPECT_EQ(r.coeff(ex(-1, 2, 1)), Scalar(0));
}

TEST(SubstExp, RingMorphism)
{
	std::mt19937_64 rng(11);
	std::uniform_int_distribution<int> c(-3, 3), e(-2, 2);
	for (int it = 0; it < 10; ++it)
	{
		TruncatedLaurent::Terms ta, tb;
		for (int i = 0; i < 3; ++i)
		{
			ta[ex(e(rng), e(rng))] = Scalar(c(rng)) * q.pow(e(rng));
			tb[ex(e(rng), e(rng))] = Scalar(c(rng));
		}
		auto a = TruncatedLaurent::polynomial({"x1", "x2"}, ta);
		auto b = TruncatedLaurent::polynomial({"x1", "x2"}, tb);
		auto lhs = (a * b).subst_exp("x1", "x2", "x0", 4);
		auto rhs = a.subst_exp("x1", "x2", "x0", 4) * b.subst_exp("x1", "x2", "x0", 4);
		auto rep = assert_equal_on(lhs, rhs, Window({"x2", "x0"}, {-10, 0}, {10, 4}));
		EXPECT_TRUE(rep.passed()) << rep.window;
	}
}

TEST(SeriesInverse, Examples)
{
	auto f = iota_expand("(e^z - 1)^2*(e^z - q)^2", {"z"}, Window({"z"}, {0}, {8}));
	auto inv = series_inverse(f);
	Scalar one_q = Scalar(1) - q;
	EXPECT_EQ(inv.coeff(ex(-2)), one_q.pow(-2));
	EXPECT_EQ(inv.coeff(ex(-1)), (q - Scalar(3)) / one_q.pow(3));
	EXPECT_EQ(inv.range(0).hi, 4);

	auto g = series_inverse(iota_expand("e^z - q", {"z"}, Window({"z"}, {0}, {4})));
	EXPECT_EQ(g.coeff(ex(0)), one_q.inv());
	EXPECT_EQ(g.coeff(ex(1)), -one_q.pow(-2));

	auto c = series_inverse(TruncatedLaurent::constant(Scalar(5)).with_vars({"z"}), 3);
	EXPECT_EQ(c.coeff(ex(0)), Scalar(mpq_class(1, 5)));
	EXPECT_EQ(c.coeff(ex(3)), Scalar());
	EXPECT_THROW(series_inverse(TruncatedLaurent({"z"}), 3), SeriesError);
}

TEST(SeriesInverse, RandomProducts)
{
	std::mt19937_64 rng(5);
	std::uniform_int_distribution<int> c(-4, 4), v(-2, 2);
	for (int it = 0; it < 50; ++it)
	{
		int val = v(rng);
		TruncatedLaurent::Terms t;
		int lead = 0;
		while (lead == 0)
			lead = c(rng);
		t[ex(val)] = Scalar(lead) * q.pow(c(rng) % 2);
		for (int k = 1; k <= 8; ++k)
			t[ex(val + k)] = Scalar(c(rng));
		int H = val + 8;
		TruncatedLaurent s({"z"}, Direction::polynomial(), {VarRange{-kInf, H, val, kInf}}, t);
		auto inv = series_inverse(s);
		auto prod = s * inv;
		auto rep = assert_equal_on(prod, TruncatedLaurent::constant(Scalar(1)).with_vars({"z"}), Window({"z"}, {-20}, {20}));
		EXPECT_TRUE(rep.passed()) << it;
		EXPECT_EQ(prod.range(0).hi, H - val);
	}
}

TEST(Iota, OddnessOfShiftedKernel)
{
	auto s = iota_expand("q*e^x/(1 - q*e^x)^2 - q^-1*e^x/(1 - q^-1*e^x)^2", {"x"}, Window({"x"}, {-3}, {9}));
	for (int k = -2; k <= 8; k += 2)
		EXPECT_TRUE(s.coeff(ex(k)).is_zero()) << k;
	EXPECT_FALSE(s.coeff(ex(1)).is_zero());
}

TEST(Compare, Reports)
{
	Window w = Window::symmetric({"x1", "x2"}, 5);
	auto a = delta_family(DeltaKind::plain, q, w);
	EXPECT_EQ(assert_equal_on(a, a, w).status, Status::pass);
	auto b = a + TruncatedLaurent::monomial({"x1", "x2"}, ex(-2, 2));
	auto r = assert_equal_on(a, b.as_distribution(), w);
	EXPECT_EQ(r.status, Status::fail);
	ASSERT_EQ(r.failures.size(), 1u);
	EXPECT_EQ(r.failures[0].tuple, "x1^-2 x2^2");
	EXPECT_EQ(r.failures[0].got - r.failures[0].expected, Scalar(1));
	auto far = delta_family(DeltaKind::plain, q, Window({"x1", "x2"}, {20, 20}, {30, 30}));
	EXPECT_EQ(assert_equal_on(a, far, w).status, Status::inconclusive);
}

TEST(Series, InfiniteProductRejected)
{
	Window w = Window::symmetric({"x1", "x2"}, 4);
	auto d = delta_family(DeltaKind::plain, Scalar(1), w);
	EXPECT_THROW((void)(d * d), SeriesError);
}
