#include "qheis/error.hpp"
#include "qheis/laws.hpp"
#include "qheis/vertexops.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace qheis;

namespace {

Scalar const q = Scalar::q();
Scalar const l = Scalar::level();

// a few states with small annihilation bounds
std::vector<FockVector> probes(ModulePtr const &m)
{
	auto vac = FockVector::vacuum(m);
	int s = has_shift(m->tag()) ? 1 : 0;
	return {vac, apply_generator(Generator{m->tag(), 0, -1, false}, vac),
	        apply_generator(Generator{m->tag(), s, -2, false}, apply_generator(Generator{m->tag(), 0, -1, false}, vac))};
}

void expect_same(OperatorSeries const &a, OperatorSeries const &b, long lo, long hi)
{
	for (auto const &v : probes(a.module()))
		for (long e = lo; e <= hi; ++e)
			EXPECT_EQ(a.coeff(e, v).to_string(), b.coeff(e, v).to_string()) << "x^" << e;
}

// c * 1_W on the window
void expect_unit(OperatorSeries const &a, Scalar const &c, long lo, long hi)
{
	for (auto const &v : probes(a.module()))
		for (long e = lo; e <= hi; ++e)
			EXPECT_EQ(a.coeff(e, v).to_string(), (e == 0 ? c * v : FockVector(a.module())).to_string()) << "x^" << e;
}

FockVector creation(ModulePtr const &m, int shift, int mode)
{
	return FockVector::basis(m, {Letter{mode, shift}});
}

} // namespace

TEST(VertexOps, FieldScaling)
{
	auto W = make_module(AlgebraTag::Hq);
	auto b0 = field_of(W, FieldFamily::beta_scaled(0));
	for (int r = -2; r <= 2; ++r)
		expect_same(field_of(W, FieldFamily::beta_scaled(r)), b0.scaled(Scalar::qpow(r)), -5, 5);
	EXPECT_THROW(field_of(W, FieldFamily::beta_indexed(0)), DomainError);
}

TEST(VertexOps, IdentitySeries)
{
	auto W = make_module(AlgebraTag::HtildeQ);
	expect_unit(OperatorSeries::identity(W), Scalar(1), -4, 4);
}

TEST(VertexOps, OrdinaryProductUnit)
{
	auto V = make_module(AlgebraTag::Bhat);
	auto a = field_of(V, FieldFamily::beta_indexed(1));
	auto one = OperatorSeries::identity(V);
	expect_same(eproduct_n(a, one, -1), a, -4, 4);
	expect_same(eproduct_n(one, a, -1), a, -4, 4);
	for (int n = 0; n <= 2; ++n)
		expect_unit(eproduct_n(a, one, n), Scalar(0), -4, 4);
}

TEST(VertexOps, PhiProductsOnHq)
{
	auto W = make_module(AlgebraTag::Hq);
	Scalar amp = l / (q - q.inv());
	for (int r = -2; r <= 2; ++r)
	{
		auto a = field_of(W, FieldFamily::beta_scaled(r)), b = field_of(W, FieldFamily::beta_scaled(0));
		auto prods = phi_product_range(a, b, 0, 2);
		for (int n = 0; n <= 2; ++n)
		{
			Scalar want = n == 0 && r == 1 ? amp : n == 0 && r == -1 ? -amp : Scalar(0);
			SCOPED_TRACE("r=" + std::to_string(r) + " n=" + std::to_string(n));
			expect_unit(prods[static_cast<std::size_t>(n)], want, -8, 8);
		}
	}
}

TEST(VertexOps, InsufficientMultiplierRefused)
{
	auto W = make_module(AlgebraTag::Hq);
	auto b = field_of(W, FieldFamily::beta_scaled(0));
	EXPECT_THROW(phi_product_n(b, b, 0, Multiplier::parse("x1 - x2")), UnsupportedError);
	EXPECT_THROW(phi_product_n(b, b, 0, Multiplier::parse("x1^2 - x2")), UnsupportedError);
	EXPECT_NO_THROW(phi_product_n(b, b, 0, Multiplier::parse("(x1 - q*x2)*(q*x1 - x2)")));
}

TEST(VertexOps, HtildeQSelfProducts)
{
	auto W = make_module(AlgebraTag::HtildeQ);
	auto a = field_of(W, FieldFamily::beta_scaled(0));
	auto prods = phi_product_range(a, a, 0, 4);
	for (int n = 0; n <= 4; ++n)
	{
		SCOPED_TRACE("n=" + std::to_string(n));
		expect_unit(prods[static_cast<std::size_t>(n)], n == 1 ? l : Scalar(0), -6, 6);
	}
}

TEST(VertexOps, MultiplierBasics)
{
	auto p = catalog_multiplier(AlgebraTag::Hq, 0, 0);
	EXPECT_EQ(p, Multiplier::parse("(x1 - q*x2)*(q*x1 - x2)"));
	EXPECT_TRUE(p.homogeneous());
	EXPECT_EQ(p.degree(), 2);
	EXPECT_EQ(p.zero_order_at_one(), 0);
	EXPECT_EQ(catalog_multiplier(AlgebraTag::HtildeQ, 0, 0).zero_order_at_one(), 2);
	EXPECT_EQ(catalog_multiplier(AlgebraTag::Hq, 1, 0).zero_order_at_one(), 1);
	EXPECT_FALSE(Multiplier::parse("x1^2 - x2").homogeneous());
	EXPECT_EQ(Multiplier::linear(q), Multiplier::parse("x1 - q*x2"));
}

TEST(VertexOps, StateFieldOfGenerator)
{
	for (auto tag : {AlgebraTag::Bhat, AlgebraTag::BhatQ})
	{
		auto V = make_module(tag);
		for (int r = -1; r <= 1; ++r)
			expect_same(state_field(creation(V, r, -1)), field_of(V, FieldFamily::beta_indexed(r)), -4, 4);
		expect_unit(state_field(FockVector::vacuum(V)), Scalar(1), -3, 3);
	}
}

TEST(VertexOps, PsiOfGenerator)
{
	auto W = make_module(AlgebraTag::Hq);
	auto V = make_module(AlgebraTag::Bhat);
	for (int r = -1; r <= 1; ++r)
		expect_same(psi_map(creation(V, r, -1), W), field_of(W, FieldFamily::beta_scaled(r)), -4, 4);
	expect_unit(psi_map(FockVector::vacuum(V), W), Scalar(1), -3, 3);
	// psi(b_{-2} 1) = coefficient of z in b(x e^z), that is x b'(x)
	auto db = field_of(W, FieldFamily::beta_scaled(0)).derivative();
	auto d2 = psi_map(creation(V, 0, -2), W);
	for (auto const &v : probes(W))
		for (long e = -4; e <= 4; ++e)
			EXPECT_EQ(d2.coeff(e, v).to_string(), db.coeff(e - 1, v).to_string()) << "x^" << e;
}

TEST(VertexOps, Translation)
{
	auto V = make_module(AlgebraTag::BhatQ);
	EXPECT_TRUE(translation(FockVector::vacuum(V)).is_zero());
	EXPECT_EQ(translation(creation(V, 1, -1)), creation(V, 1, -2));
	EXPECT_EQ(translation(creation(V, 0, -2)), Scalar(2) * creation(V, 0, -3));
	// D is a derivation
	auto b = [&](int shift, int mode, FockVector const &w) { return apply_generator(Generator{V->tag(), shift, mode, false}, w); };
	auto uv = b(0, -1, creation(V, 1, -1));
	EXPECT_EQ(translation(uv).to_string(), (b(0, -2, creation(V, 1, -1)) + b(0, -1, creation(V, 1, -2))).to_string());
}

TEST(VertexOps, SkewSymmetryOnBhat)
{
	auto V = make_module(AlgebraTag::Bhat);
	for (auto const &[e, w] : skew_defect(creation(V, 0, -1), creation(V, 1, -1), 4))
		EXPECT_TRUE(w.is_zero()) << "x^" << e;
}

TEST(VertexOps, SKernelUnitarity)
{
	int const order = 6;
	for (int r = -1; r <= 1; ++r)
		for (int s = -1; s <= 1; ++s)
		{
			auto g = extract_s_kernel(r, s, order).g, h = extract_s_kernel(s, r, order).g;
			for (int e = -order; e <= order; ++e)
			{
				Scalar sign = e % 2 == 0 ? Scalar(1) : Scalar(-1);
				EXPECT_EQ(g.coeff(Exponent{e, 0, 0}) + sign * h.coeff(Exponent{e, 0, 0}), Scalar(0)) << r << "," << s << " x^" << e;
			}
		}
}

TEST(VertexOps, AnnihilationBound)
{
	for (auto tag : {AlgebraTag::Hq, AlgebraTag::HtildeQ})
	{
		auto W = make_module(tag);
		auto a = field_of(W, FieldFamily::beta_scaled(1));
		for (auto const &v : probes(W))
		{
			long N = a.annihilation_bound(v);
			for (long n = N; n <= N + 4; ++n)
				EXPECT_TRUE(a.mode_apply(static_cast<int>(n), v).is_zero()) << to_string(tag) << " n=" << n;
		}
		// b_2 b_{-2} 1 != 0, so the bound on b_{-2} 1 is above 2
		auto v = apply_generator(Generator{tag, 0, -2, false}, FockVector::vacuum(W));
		EXPECT_GT(a.annihilation_bound(v), 2);
	}
}

TEST(Laws, CatalogSortedAndUnknownRefused)
{
	auto const &ids = law_catalog();
	EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
	EXPECT_EQ(std::count(ids.begin(), ids.end(), "eq-3.3"), 1);
	EXPECT_FALSE(law_summary("eq-3.5").empty());
	EXPECT_THROW(verify_identity("no-such-law", LawConfig{}), DomainError);
}

TEST(Laws, PassAndNegativeControls)
{
	LawConfig cfg;
	cfg.window = 5;
	auto ok = verify_identity("eq-3.5", cfg);
	EXPECT_TRUE(ok.passed()) << ok.message;
	EXPECT_GT(ok.checked, 0u);

	cfg.params["p"] = "x1 - q*x2";
	auto bad = verify_identity("eq-3.5", cfg);
	EXPECT_EQ(bad.status, Status::fail);
	EXPECT_FALSE(bad.failures.empty());

	cfg.params["p"] = "(x1 - x2)*(x1 - q*x2)^2";
	EXPECT_EQ(verify_identity("eq-4.5", cfg).status, Status::fail);
}

TEST(Laws, RationalModeAgreesWithSymbolic)
{
	LawConfig cfg;
	cfg.window = 4;
	auto sym = verify_identity("eq-3.3", cfg);
	RationalPoint pt(mpq_class(3, 5), mpq_class(2));
	Report num;
	{
		ScopedPoint at(pt);
		num = verify_identity("eq-3.3", cfg);
	}
	ASSERT_TRUE(sym.passed());
	ASSERT_TRUE(num.passed());
	ASSERT_EQ(sym.digest.size(), num.digest.size());
	for (std::size_t i = 0; i < sym.digest.size(); ++i)
	{
		EXPECT_EQ(sym.digest[i].first, num.digest[i].first);
		EXPECT_EQ(sym.digest[i].second.evaluate_at(pt), num.digest[i].second.constant_value()) << sym.digest[i].first;
	}
}
