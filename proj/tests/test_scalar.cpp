#include "qheis/error.hpp"
#include "qheis/scalar.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qheis;

namespace {

BiPoly qpoly(std::vector<long> c)
{
	std::vector<mpz_class> z(c.begin(), c.end());
	return BiPoly(UPoly(std::move(z)));
}

Scalar q = Scalar::q();
Scalar l = Scalar::level();

} // namespace

TEST(Scalar, NormalizeCancelsFactor)
{
	Scalar s = Scalar::normalize(qpoly({-1, 0, 1}), qpoly({-1, 1}));
	EXPECT_EQ(s, q + Scalar(1));
	EXPECT_EQ(s.denominator(), BiPoly(1));
}

TEST(Scalar, NormalizeZero)
{
	BiPoly den = qpoly({0, 0, 0, 1}) + BiPoly::level();
	Scalar s = Scalar::normalize(BiPoly(), den);
	EXPECT_TRUE(s.is_zero());
	EXPECT_EQ(s.denominator(), BiPoly(1));
}

TEST(Scalar, NormalizeContent)
{
	Scalar s = Scalar::normalize(qpoly({0, 2}), BiPoly(4));
	EXPECT_EQ(s.numerator(), BiPoly::q());
	EXPECT_EQ(s.denominator(), BiPoly(2));
}

TEST(Scalar, NormalizeSignAndZeroDenominator)
{
	Scalar s = Scalar::normalize(BiPoly(1), qpoly({1, -1}));
	EXPECT_EQ(s.denominator().sign(), 1);
	EXPECT_EQ(s, Scalar(-1) / (q - Scalar(1)));
	EXPECT_THROW(Scalar::normalize(BiPoly(1), BiPoly()), ZeroDenominator);
}

TEST(Scalar, MixedVariableGcd)
{
	// (l q - l)(q + l) / ((q - 1)(l + 1)) == l (q + l) / (l + 1)
	Scalar a = (l * q - l) * (q + l);
	Scalar b = (q - Scalar(1)) * (l + Scalar(1));
	EXPECT_EQ(a / b, l * (q + l) / (l + Scalar(1)));
	EXPECT_EQ((a / b) * (b / a), Scalar(1));
}

TEST(Scalar, QInteger)
{
	EXPECT_TRUE(qint(0).is_zero());
	EXPECT_EQ(qint(2), q + q.inv());
	EXPECT_EQ(qint(-3), -(q * q + Scalar(1) + Scalar::qpow(-2)));
	EXPECT_EQ(qint(1), Scalar(1));
}

TEST(Scalar, QIntegerMatchesDefinitionSymbolically)
{
	for (int m = -20; m <= 20; ++m)
	{
		Scalar def = (Scalar::qpow(m) - Scalar::qpow(-m)) / (q - q.inv());
		EXPECT_EQ(qint(m), def) << m;
		EXPECT_EQ(qint(-m), -qint(m)) << m;
	}
}

TEST(Scalar, QIntegerNumeric)
{
	for (mpq_class q0 : {mpq_class(2), mpq_class(3, 5), mpq_class(-7, 2)})
	{
		RationalPoint p(q0, 0);
		for (int m = -20; m <= 20; ++m)
		{
			mpq_class qm = 1, qinv = 1;
			for (int i = 0; i < std::abs(m); ++i)
				qm *= q0;
			if (m < 0)
				qm = 1 / qm;
			qinv = 1 / qm;
			mpq_class want = (qm - qinv) / (q0 - 1 / q0);
			EXPECT_EQ(qint(m).evaluate_at(p), want) << m;
		}
	}
}

TEST(Scalar, Evaluate)
{
	EXPECT_EQ(qint(2).evaluate_at(RationalPoint(2, 0)), mpq_class(5, 2));
	EXPECT_EQ((Scalar(1) / (q - q.inv())).evaluate_at(RationalPoint(2, 0)), mpq_class(2, 3));
	EXPECT_THROW(RationalPoint(1, 0), DomainError);
	EXPECT_THROW(RationalPoint(-1, 3), DomainError);
	EXPECT_THROW(RationalPoint(0, 3), DomainError);
}

TEST(Scalar, EvaluateNamesVanishingFactor)
{
	Scalar s = Scalar(1) / ((q - Scalar(2)) * (l + Scalar(1)));
	try
	{
		s.evaluate_at(RationalPoint(2, 5));
		FAIL();
	}
	catch (EvaluationError const &e)
	{
		EXPECT_NE(std::string(e.what()).find("q - 2"), std::string::npos) << e.what();
	}
	EXPECT_THROW(s.evaluate_at(RationalPoint(3, -1)), EvaluationError);
}

namespace {

Scalar random_scalar(std::mt19937_64 &rng)
{
	std::uniform_int_distribution<int> coef(-3, 3), deg(0, 2);
	auto poly = [&] {
		Scalar p;
		int dq = deg(rng), dl = deg(rng) > 1 ? 1 : 0;
		for (int i = 0; i <= dq; ++i)
			for (int j = 0; j <= dl; ++j)
				p += Scalar(coef(rng)) * q.pow(i) * l.pow(j);
		return p;
	};
	Scalar d = poly();
	while (d.is_zero())
		d = poly();
	return poly() / d;
}

} // namespace

TEST(Scalar, RandomRoundTrip)
{
	std::mt19937_64 rng(20240611);
	RationalPoint p(mpq_class(3, 5), 2);
	int checked = 0;
	for (int i = 0; i < 200; ++i)
	{
		Scalar a = random_scalar(rng), b = random_scalar(rng);
		mpq_class va, vb;
		try
		{
			va = a.evaluate_at(p);
			vb = b.evaluate_at(p);
		}
		catch (EvaluationError const &)
		{
			continue;
		}
		++checked;
		EXPECT_EQ((a + b).evaluate_at(p), va + vb);
		EXPECT_EQ((a * b).evaluate_at(p), va * vb);
		if (vb != 0)
			EXPECT_EQ((a / b).evaluate_at(p), va / vb);
		EXPECT_TRUE((a - a).is_zero());
		if (!a.is_zero())
			EXPECT_EQ(a * a.inv(), Scalar(1));
	}
	EXPECT_GT(checked, 150);
}

TEST(Scalar, NormalizeIdempotent)
{
	std::mt19937_64 rng(7);
	for (int i = 0; i < 50; ++i)
	{
		Scalar a = random_scalar(rng);
		Scalar b = Scalar::normalize(a.numerator(), a.denominator());
		EXPECT_EQ(a, b);
		EXPECT_EQ(Scalar::normalize(b.numerator(), b.denominator()), b);
	}
}

TEST(Binomial, Generalized)
{
	EXPECT_EQ(binomial(5, 2), 10);
	EXPECT_EQ(binomial(-1, 3), -1);
	EXPECT_EQ(binomial(-2, 2), 3);
	EXPECT_EQ(binomial(3, 5), 0);
	EXPECT_EQ(binomial(4, -1), 0);
}
