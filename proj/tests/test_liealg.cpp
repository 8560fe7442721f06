#include "qheis/error.hpp"
#include "qheis/kernel.hpp"
#include "qheis/liealg.hpp"

#include <gtest/gtest.h>

using namespace qheis;

namespace {

Scalar const q = Scalar::q();

std::string qp(int k) { return "q^" + std::to_string(k); }

// f_d through x^J from the kernel grammar, independent of the library's f path.
TruncatedLaurent f_via_kernel(int d, int J)
{
	std::string a = qp(d + 1), b = qp(d - 1);
	std::string k = a + "*e^x/(1 - " + a + "*e^x)^2 - " + b + "*e^x/(1 - " + b + "*e^x)^2";
	return iota_expand(k, {"x"}, Window({"x"}, {-3}, {J}));
}

// Full right side of the generating-function bracket for shift difference d,
// as a distribution in (x1, x2).
TruncatedLaurent bracket_series(int d, int N)
{
	Window w = Window::symmetric({"x1", "x2"}, N);
	auto f = f_via_kernel(d, 2 * N + 2);
	TruncatedLaurent acc({"x1", "x2"}, Direction::distribution());
	for (int j = -2; j <= 2 * N; ++j)
	{
		Scalar c = f.coeff(Exponent{j, 0, 0});
		if (c.is_zero())
			continue;
		std::string k = j >= 0 ? "(x1 - x2)^" + std::to_string(j) : "1/(x1 - x2)^" + std::to_string(-j);
		acc = acc + c * iota_expand(k, {"x2", "x1"}, w).with_vars({"x1", "x2"}).as_distribution();
	}
	int dd = (d == 0 ? 1 : 0) - (d == 1 ? 1 : 0);
	if (dd != 0)
		acc = acc + Scalar(dd) * delta_family(DeltaKind::dshift, Scalar(1), w);
	return acc.restricted(w);
}

} // namespace

TEST(LieAlg, Parsing)
{
	EXPECT_EQ(parse_algebra("BhatQ"), AlgebraTag::BhatQ);
	EXPECT_THROW(parse_algebra("foo"), DomainError);
	auto g = parse_generator(AlgebraTag::BhatQ, "b(1)_-2");
	EXPECT_EQ(g.shift, 1);
	EXPECT_EQ(g.mode, -2);
	EXPECT_EQ(g.to_string(), "b(1)_-2");
	EXPECT_EQ(parse_generator(AlgebraTag::Hq, "b_3").mode, 3);
	EXPECT_THROW(parse_generator(AlgebraTag::Hq, "b(1)_3"), ParseError);
}

TEST(LieAlg, BracketExamples)
{
	AlgebraSpec hq(AlgebraTag::Hq), ht(AlgebraTag::HtildeQ), bq(AlgebraTag::BhatQ);
	EXPECT_EQ(hq.bracket(0, 3, 0, -3), q * q + Scalar(1) + q.pow(-2));
	EXPECT_EQ(ht.bracket(0, 2, 0, -2), Scalar(2) * (Scalar(1) - q * q));
	EXPECT_EQ(ht.bracket(0, -2, 0, 2), Scalar(-2) * (Scalar(1) - q * q));
	EXPECT_EQ(bq.bracket(1, 3, 0, -3), Scalar(-3));
	EXPECT_EQ(bq.bracket(0, -1, 1, -2), -f_via_kernel(-1, 3).coeff(Exponent{1, 0, 0}));
	EXPECT_EQ(bq.bracket(Generator{AlgebraTag::BhatQ, 0, 1}, Generator::c(AlgebraTag::BhatQ)), Scalar());
	EXPECT_THROW(bq.bracket(Generator{AlgebraTag::Hq, 0, 1}, Generator{AlgebraTag::BhatQ, 0, -1}), DomainError);
}

TEST(LieAlg, FCoefficients)
{
	EXPECT_EQ(f_coefficient(-1, -2), Scalar(1));
	EXPECT_EQ(f_coefficient(1, -2), Scalar(-1));
	EXPECT_EQ(f_coefficient(3, -2), Scalar());
	EXPECT_EQ(f_coefficient(0, 0), Scalar());
	for (int n = -3; n <= 3; ++n)
	{
		auto oracle = f_via_kernel(n, 6);
		EXPECT_EQ(f_coefficient(n, -2), Scalar((n == -1 ? 1 : 0) - (n == 1 ? 1 : 0))) << n;
		EXPECT_TRUE(f_coefficient(n, -1).is_zero()) << n;
		for (int j = -2; j <= 6; ++j)
		{
			EXPECT_EQ(f_coefficient(n, j), oracle.coeff(Exponent{j, 0, 0})) << n << " " << j;
			// f_{-n}(-x) = -f_n(x)
			Scalar sign = (j % 2 == 0) ? Scalar(1) : Scalar(-1);
			EXPECT_EQ(sign * f_coefficient(-n, j), -f_coefficient(n, j)) << n << " " << j;
		}
	}
	// g(a, 0) = a/(1-a)^2 at a = q and 1/q cancels
	Scalar a = q, b = q.inv();
	EXPECT_TRUE((a / (Scalar(1) - a).pow(2) - b / (Scalar(1) - b).pow(2)).is_zero());
}

TEST(LieAlg, BhatQMatchesUnifiedExtraction)
{
	AlgebraSpec bq(AlgebraTag::BhatQ);
	for (int d = -3; d <= 3; ++d)
	{
		auto s = bracket_series(d, 5);
		for (int r = -2; r <= 2; ++r)
		{
			int sidx = r - d;
			if (sidx < -2 || sidx > 2)
				continue;
			for (int m = -6; m <= 4; ++m)
				for (int n = -6; n <= 4; ++n)
					EXPECT_EQ(bq.bracket(r, m, sidx, n), s.coeff(Exponent{-m - 1, -n - 1, 0})) << d << " " << m << " " << n;
		}
	}
}

TEST(LieAlg, BhatQStructure)
{
	AlgebraSpec bq(AlgebraTag::BhatQ);
	EXPECT_TRUE(check_skew_symmetry(bq, {-2, 2}, {-6, 6}).passed());
	EXPECT_TRUE(check_positive_abelian(bq, {-2, 2}, {-6, 6}).passed());
	for (int d = -3; d <= 3; ++d)
		for (int m = 0; m <= 6; ++m)
			for (int n = -6; n <= 6; ++n)
			{
				int dd = (d == 0 ? 1 : 0) - (d == 1 ? 1 : 0);
				EXPECT_EQ(bq.bracket(d, m, 0, n), Scalar(m + n == 0 ? dd * m : 0));
			}
	// creation-creation bracket off the diagonal
	EXPECT_FALSE(bq.bracket(0, -1, 1, -2).is_zero());
	// flipping one coefficient breaks the f_{-n}(-x) = -f_n(x) pairing
	auto bad = bq.with_f([](int n, int j) { return n == 1 && j == 1 ? -f_coefficient(n, j) : f_coefficient(n, j); });
	EXPECT_EQ(check_skew_symmetry(bad, {-2, 2}, {-6, 6}).status, Status::fail);
}

TEST(LieAlg, SkewSymmetryOtherAlgebras)
{
	for (auto t : {AlgebraTag::Hq, AlgebraTag::HtildeQ, AlgebraTag::Bhat, AlgebraTag::GradedL})
		EXPECT_TRUE(check_skew_symmetry(AlgebraSpec(t), {-2, 2}, {-8, 8}).passed()) << to_string(t);
}

TEST(LieAlg, ShiftInvariance)
{
	EXPECT_TRUE(verify_shift_invariance(AlgebraSpec(AlgebraTag::BhatQ), 5, {-2, 2}, {-4, 4}).passed());
	EXPECT_TRUE(verify_shift_invariance(AlgebraSpec(AlgebraTag::Bhat), -3, {-2, 2}, {-4, 4}).passed());
	auto bad = AlgebraSpec(AlgebraTag::Bhat).with_form([](int r, int s) { return bilinear_form(r, s) * Scalar(r == 0 ? 2 : 1); });
	EXPECT_EQ(verify_shift_invariance(bad, -3, {-2, 2}, {-4, 4}).status, Status::fail);
}

TEST(LieAlg, GradedConstants)
{
	EXPECT_EQ(graded_leading_constant(0, 0, 3, -3), Scalar(3));
	EXPECT_EQ(graded_leading_constant(0, 1, -2, 2), Scalar(2));
	EXPECT_EQ(graded_leading_constant(1, 0, -2, 2), Scalar(0));
	EXPECT_TRUE(check_graded_agreement({-2, 2}, {-6, 6}).passed());
	// BhatQ is not graded: a creation pair with m + n != 0 has a nonzero bracket
	EXPECT_FALSE(AlgebraSpec(AlgebraTag::BhatQ).bracket(0, -1, 1, -2).is_zero());
	EXPECT_TRUE(graded_leading_constant(0, 1, -1, -2).is_zero());
}

TEST(LieAlg, FormNondegenerate)
{
	for (int N = 1; N <= 4; ++N)
	{
		EXPECT_EQ(form_rank(-N, N - 1), 2 * N);
		EXPECT_EQ(form_rank(-N, N), 2 * N); // odd size skew matrix is singular
	}
	for (int r = -3; r <= 3; ++r)
		for (int s = -3; s <= 3; ++s)
			EXPECT_EQ(bilinear_form(r, s), -bilinear_form(s, r));
}
