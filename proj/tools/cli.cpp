#include "cli.hpp"

#include "qheis/error.hpp"
#include "qheis/kernel.hpp"
#include "qheis/laws.hpp"
#include "qheis/vertexops.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

namespace qheis::cli {

namespace {

using nlohmann::ordered_json;

constexpr int kPass = 0, kFail = 1, kUsage = 2;
constexpr int kMaxWindow = 64;

// Usage error pointing at one argument (and optionally a column inside it).
struct Usage
{
	std::string message;
	std::string arg;                       // the offending text
	std::size_t column = std::string::npos; // inside arg
};

void report_usage(Usage const &u, std::vector<std::string> const &args, std::ostream &err)
{
	fmt::print(err, "error: {}\n", u.message);
	if (u.arg.empty())
		return;
	std::string line = "  qheis";
	std::size_t at = std::string::npos;
	for (auto const &a : args)
	{
		line += ' ';
		if (at == std::string::npos && a == u.arg)
			at = line.size();
		line += a;
	}
	if (at == std::string::npos)
	{
		// came from the environment or a derived value
		line = "  " + u.arg;
		at = 2;
	}
	std::size_t col = u.column == std::string::npos ? 0 : std::min(u.column, u.arg.size());
	std::size_t len = u.column == std::string::npos ? std::max<std::size_t>(u.arg.size(), 1) : 1;
	fmt::print(err, "{}\n{}{}\n", line, std::string(at + col, ' '), std::string(len, '^'));
}

int parse_window(std::string const &text)
{
	std::size_t used = 0;
	int w = 0;
	try
	{
		w = std::stoi(text, &used);
	}
	catch (std::exception const &)
	{
		throw Usage{"window must be a positive integer", text, 0};
	}
	if (used != text.size())
		throw Usage{"window must be a positive integer", text, used};
	if (w < 1 || w > kMaxWindow)
		throw Usage{fmt::format("window must lie in [1, {}]", kMaxWindow), text};
	return w;
}

// QVA_WINDOW, else the built-in default
int default_window(int fallback)
{
	char const *env = std::getenv("QVA_WINDOW");
	if (!env || !*env)
		return fallback;
	try
	{
		return parse_window(env);
	}
	catch (Usage &u)
	{
		u.message = "QVA_WINDOW: " + u.message;
		u.arg = std::string("QVA_WINDOW=") + env;
		if (u.column != std::string::npos)
			u.column += 11;
		throw;
	}
}

std::optional<mpq_class> parse_point(std::string const &text, char const *what)
{
	if (text == "symbolic")
		return std::nullopt;
	mpq_class v;
	if (text.empty() || v.set_str(text, 10) != 0)
		throw Usage{fmt::format("{} must be 'symbolic' or a rational like 3/5", what), text};
	v.canonicalize();
	return v;
}

struct Mode
{
	std::string q = "symbolic", level = "symbolic";
	std::optional<mpq_class> q0, l0;

	void resolve()
	{
		q0 = parse_point(q, "--q");
		l0 = parse_point(level, "--level");
	}
	bool rational() const { return q0 && l0; }
	RationalPoint point() const { return RationalPoint(*q0, *l0); }
	// laws run either fully symbolic or at a full rational point
	void require_full() const
	{
		if (bool(q0) != bool(l0))
			throw Usage{"rational mode needs both --q and --level", q0 ? q : level};
	}
};

void add_mode(CLI::App *sub, Mode &m)
{
	sub->add_option("--q", m.q, "q mode: symbolic or a rational q0 (not 0, +-1)");
	sub->add_option("--level", m.level, "level: symbolic or a rational l0");
}

// Runs f under the rational point if one is set.
template <class F> auto under(Mode const &m, F &&f)
{
	if (m.rational())
	{
		ScopedPoint at(m.point());
		return f();
	}
	return f();
}

AlgebraTag algebra_arg(std::string const &text)
{
	try
	{
		return parse_algebra(text);
	}
	catch (Error const &)
	{
		throw Usage{"unknown algebra (hq, htildeq, bhat, bhatq, gradedl)", text};
	}
}

// ---------------------------------------------------------------- reports

ordered_json law_json(std::string const &law, Report const &r, bool timing)
{
	ordered_json fails = ordered_json::array();
	for (auto const &f : r.failures)
		fails.push_back({{"tuple", f.tuple}, {"expected", f.expected.to_string()}, {"got", f.got.to_string()}});
	ordered_json params = ordered_json::object();
	for (auto const &[k, v] : r.params)
		params[k] = v;
	ordered_json j;
	j["suite"] = law;
	j["params"] = params;
	j["window"] = r.window;
	j["status"] = to_string(r.status);
	j["failures"] = fails;
	j["seed"] = r.seed;
	j["elapsed_ms"] = timing ? static_cast<long long>(r.elapsed_ms) : 0LL;
	j["checked"] = r.checked;
	if (!r.message.empty())
		j["message"] = r.message;
	return j;
}

struct RunConfig
{
	std::string suite;
	std::vector<std::string> laws;
	LawConfig law;
	Mode mode;
	unsigned jobs = 0;
	bool timing = true;
	bool json = false;
	std::string out_path;
};

// Laws go to a worker pool; results come back in law-id order.
std::vector<Report> run_laws(RunConfig const &rc)
{
	std::vector<Report> res(rc.laws.size());
	std::atomic<std::size_t> next{0};
	unsigned jobs = rc.jobs ? rc.jobs : std::max(1u, std::thread::hardware_concurrency());
	jobs = std::min<unsigned>(jobs, static_cast<unsigned>(rc.laws.size()));
	auto work = [&] {
		std::optional<ScopedPoint> at;
		if (rc.mode.rational())
			at.emplace(rc.mode.point());
		for (std::size_t i; (i = next++) < rc.laws.size();)
			res[i] = verify_identity(rc.laws[i], rc.law);
	};
	std::vector<std::thread> pool;
	for (unsigned t = 1; t < jobs; ++t)
		pool.emplace_back(work);
	work();
	for (auto &t : pool)
		t.join();
	return res;
}

int emit(RunConfig const &rc, std::vector<Report> const &res, double ms, std::ostream &out, std::ostream &err)
{
	bool ok = std::all_of(res.begin(), res.end(), [](Report const &r) { return r.passed(); });
	ordered_json doc;
	doc["suite"] = rc.suite;
	doc["params"] = {{"window", std::to_string(rc.law.window)},
	                 {"z_order", std::to_string(rc.law.z_order)},
	                 {"mode", rc.mode.rational() ? "rational q=" + rc.mode.q0->get_str() + " l=" + rc.mode.l0->get_str() : "symbolic"}};
	doc["window"] = fmt::format("|e| <= {}", rc.law.window);
	doc["status"] = ok ? "pass" : "fail";
	ordered_json fails = ordered_json::array();
	ordered_json laws = ordered_json::array();
	for (std::size_t i = 0; i < res.size(); ++i)
	{
		for (auto const &f : res[i].failures)
			fails.push_back({{"law", rc.laws[i]}, {"tuple", f.tuple}, {"expected", f.expected.to_string()}, {"got", f.got.to_string()}});
		if (res[i].status == Status::error || res[i].status == Status::inconclusive)
			fails.push_back({{"law", rc.laws[i]}, {"status", to_string(res[i].status)}, {"message", res[i].message}});
		laws.push_back(law_json(rc.laws[i], res[i], rc.timing));
	}
	doc["failures"] = fails;
	doc["seed"] = rc.law.seed;
	doc["elapsed_ms"] = rc.timing ? static_cast<long long>(ms) : 0LL;
	doc["laws"] = laws;

	if (!rc.out_path.empty())
	{
		std::ofstream f(rc.out_path);
		if (!f)
		{
			fmt::print(err, "error: cannot write {}\n", rc.out_path);
			return kUsage;
		}
		f << doc.dump(2) << '\n';
	}
	if (rc.json)
	{
		out << doc.dump(2) << '\n';
		return ok ? kPass : kFail;
	}
	for (std::size_t i = 0; i < res.size(); ++i)
	{
		auto const &r = res[i];
		std::string upper = to_string(r.status);
		std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
		fmt::print(out, "{:<13} {:<20} checked={:<6} window={}", upper, rc.laws[i], r.checked, r.window);
		if (rc.timing)
			fmt::print(out, "  {} ms", static_cast<long long>(r.elapsed_ms));
		out << '\n';
		if (!r.message.empty())
			fmt::print(out, "    {}\n", r.message);
		std::size_t shown = 0;
		for (auto const &f : r.failures)
		{
			if (++shown > 5)
			{
				fmt::print(out, "    ... {} more\n", r.failures.size() - 5);
				break;
			}
			fmt::print(out, "    at {}: expected {}, got {}\n", f.tuple, f.expected.to_string(), f.got.to_string());
		}
	}
	std::size_t passed = static_cast<std::size_t>(std::count_if(res.begin(), res.end(), [](Report const &r) { return r.passed(); }));
	fmt::print(out, "{}: {}/{} laws pass (seed {}, {})\n", rc.suite, passed, res.size(), rc.law.seed,
	           std::string(doc["params"]["mode"]));
	return ok ? kPass : kFail;
}

// ---------------------------------------------------------------- commands

struct Args
{
	// shared
	std::string window_text;
	int z_order = 6;
	std::uint64_t seed = 20240611;
	Mode mode;
	unsigned jobs = 0;
	bool no_timing = false, json = false;
	std::string out_path;
	// verify / suite
	std::vector<std::string> laws, params;
	std::string suite = "paper-all";
	// algebra commands
	std::string algebra = "hq";
	int r = 0, s = 0, m = 0, n = 0;
	std::string p, state, word;
	// expand
	std::string kernel, direction = "x2,x1";
};

int window_or(Args const &a, int fallback)
{
	return a.window_text.empty() ? default_window(fallback) : parse_window(a.window_text);
}

int cmd_expand(Args const &a, std::ostream &out)
{
	std::vector<std::string> dir;
	std::stringstream ss(a.direction);
	for (std::string v; std::getline(ss, v, ',');)
		dir.push_back(v);
	for (auto const &v : dir)
		if (std::find(kernel_var_names().begin(), kernel_var_names().end(), v) == kernel_var_names().end())
			throw Usage{"unknown variable '" + v + "' in --direction", a.direction, a.direction.find(v)};
	int w = window_or(a, 8);
	return under(a.mode, [&] {
		try
		{
			auto s = iota_expand(a.kernel, dir, Window::symmetric(dir, w));
			out << s.to_string() << '\n';
		}
		catch (ParseError const &e)
		{
			throw Usage{e.what(), a.kernel, e.position()};
		}
		catch (SeriesError const &e)
		{
			throw Usage{e.what(), a.kernel};
		}
		return kPass;
	});
}

int cmd_bracket(Args const &a, std::ostream &out)
{
	AlgebraSpec alg(algebra_arg(a.algebra));
	return under(a.mode, [&] {
		Scalar c = alg.bracket(a.r, a.m, a.s, a.n);
		out << c.to_string() << '\n';
		return kPass;
	});
}

ModulePtr module_for(Args const &a, AlgebraTag tag)
{
	// a rational level alone goes into the module; a full point is ambient
	if (a.mode.l0 && !a.mode.q0)
		return make_module(tag, Scalar(*a.mode.l0));
	return make_module(tag);
}

void require_q_with_level(Mode const &m)
{
	if (m.q0 && !m.l0)
		throw Usage{"a rational --q needs a rational --level too", m.q};
}

int cmd_fock_apply(Args const &a, std::ostream &out)
{
	AlgebraTag tag = algebra_arg(a.algebra);
	require_q_with_level(a.mode);
	return under(a.mode, [&] {
		ModulePtr W = module_for(a, tag);
		FockVector v = FockVector::vacuum(W);
		if (!a.state.empty() && a.state != "vac")
		{
			try
			{
				v = parse_state(W, a.state);
			}
			catch (ParseError const &e)
			{
				throw Usage{e.what(), a.state, e.position()};
			}
			catch (Error const &e)
			{
				throw Usage{e.what(), a.state};
			}
		}
		std::vector<Generator> gens;
		std::stringstream ss(a.word);
		for (std::string g; ss >> g;)
		{
			try
			{
				gens.push_back(parse_generator(tag, g));
			}
			catch (Error const &e)
			{
				throw Usage{e.what(), a.word, a.word.find(g)};
			}
		}
		for (auto it = gens.rbegin(); it != gens.rend(); ++it)
			v = apply_generator(*it, v);
		out << v.to_string() << '\n';
		return kPass;
	});
}

int cmd_phi_product(Args const &a, std::ostream &out)
{
	AlgebraTag tag = algebra_arg(a.algebra);
	require_q_with_level(a.mode);
	int w = window_or(a, 8);
	return under(a.mode, [&] {
		ModulePtr W = module_for(a, tag);
		auto fam = [&](int r) { return mode_offset(tag) == 0 ? FieldFamily::beta_scaled(r) : FieldFamily::beta_indexed(r); };
		OperatorSeries A = field_of(W, fam(a.r)), B = field_of(W, fam(a.s));
		std::optional<Multiplier> p;
		if (!a.p.empty())
		{
			try
			{
				p = Multiplier::parse(a.p);
			}
			catch (ParseError const &e)
			{
				throw Usage{e.what(), a.p, e.position()};
			}
		}
		OperatorSeries prod = p ? phi_product_n(A, B, a.n, *p) : phi_product_n(A, B, a.n);
		// probes: the vacuum and two excited states
		FockVector vac = FockVector::vacuum(W);
		int sh = has_shift(tag) ? 1 : 0;
		std::vector<FockVector> probes{vac, apply_generator(Generator{tag, 0, -1, false}, vac),
		                               apply_generator(Generator{tag, sh, -2, false}, apply_generator(Generator{tag, 0, -1, false}, vac))};
		Scalar c = prod.coeff(0, vac).coeff({});
		bool unit = true;
		for (auto const &v : probes)
			for (long e = -w; e <= w && unit; ++e)
				unit = prod.coeff(e, v) == (e == 0 ? c * v : FockVector(W));
		if (unit)
		{
			out << (c.is_zero() ? std::string("0") : "(" + c.to_string() + ")*1_W") << '\n';
			return kPass;
		}
		// not a multiple of the identity: list coefficients on the probes
		for (std::size_t i = 0; i < probes.size(); ++i)
			for (long e = -w; e <= w; ++e)
			{
				auto x = prod.coeff(e, probes[i]);
				if (!x.is_zero())
					fmt::print(out, "x^{} {} -> {}\n", e, probes[i].to_string(), x.to_string());
			}
		return kPass;
	});
}

RunConfig run_config(Args const &a, int default_win)
{
	RunConfig rc;
	rc.law.window = window_or(a, default_win);
	rc.law.z_order = a.z_order;
	rc.law.seed = a.seed;
	rc.mode = a.mode;
	rc.mode.require_full();
	rc.jobs = a.jobs;
	rc.timing = !a.no_timing;
	rc.json = a.json;
	rc.out_path = a.out_path;
	for (auto const &kv : a.params)
	{
		auto eq = kv.find('=');
		if (eq == std::string::npos || eq == 0)
			throw Usage{"--param expects key=value", kv, eq == std::string::npos ? kv.size() : 0};
		rc.law.params[kv.substr(0, eq)] = kv.substr(eq + 1);
	}
	return rc;
}

int cmd_verify(Args const &a, std::ostream &out, std::ostream &err)
{
	RunConfig rc = run_config(a, 8);
	auto const &cat = law_catalog();
	for (auto const &l : a.laws)
		if (std::find(cat.begin(), cat.end(), l) == cat.end())
			throw Usage{"unknown law id '" + l + "' (see 'qheis verify --list')", l};
	rc.laws = a.laws;
	std::sort(rc.laws.begin(), rc.laws.end());
	rc.laws.erase(std::unique(rc.laws.begin(), rc.laws.end()), rc.laws.end());
	rc.suite = rc.laws.size() == 1 ? rc.laws[0] : "verify";
	auto t0 = std::chrono::steady_clock::now();
	auto res = run_laws(rc);
	return emit(rc, res, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count(), out, err);
}

int cmd_suite(Args const &a, std::ostream &out, std::ostream &err)
{
	int win;
	if (a.suite == "paper-all")
		win = 8;
	else if (a.suite == "fast")
		win = 5;
	else
		throw Usage{"unknown suite (paper-all, fast)", a.suite};
	// the suite fixes its window; --window still overrides
	RunConfig rc = run_config(a, win);
	if (a.window_text.empty())
		rc.law.window = win;
	rc.suite = a.suite;
	rc.laws = law_catalog();
	auto t0 = std::chrono::steady_clock::now();
	auto res = run_laws(rc);
	return emit(rc, res, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count(), out, err);
}

void add_run_flags(CLI::App *sub, Args &a)
{
	sub->add_option("--window", a.window_text, "exponent bound (default $QVA_WINDOW or the suite's)");
	sub->add_option("--z-order", a.z_order, "x0 / z truncation order")->check(CLI::Range(1, 32));
	sub->add_option("--seed", a.seed, "seed for randomized checks");
	sub->add_option("--param", a.params, "law parameter key=value (r, s, p, algebra, ...)");
	sub->add_option("--jobs", a.jobs, "worker threads (default: all cores)");
	sub->add_flag("--no-timing", a.no_timing, "report elapsed_ms as 0 (byte-identical reruns)");
	sub->add_flag("--json", a.json, "print the machine report instead of text");
	sub->add_option("--out", a.out_path, "also write the machine report to a file");
	add_mode(sub, a.mode);
}

void add_algebra_flags(CLI::App *sub, Args &a)
{
	sub->add_option("--algebra", a.algebra, "hq, htildeq, bhat, bhatq, gradedl");
	add_mode(sub, a.mode);
}

} // namespace

int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
	Args a;
	CLI::App app{"Exact computations with deformed Heisenberg algebras and their vertex operators", "qheis"};
	app.require_subcommand(1);

	auto *expand = app.add_subcommand("expand", "expand a rational kernel in a direction");
	expand->add_option("--kernel", a.kernel, "kernel text, e.g. 1/(1-q*x1/x2)^2")->required();
	expand->add_option("--direction", a.direction, "variables outermost first; the last is the series variable");
	expand->add_option("--window", a.window_text, "exponent bound");
	add_mode(expand, a.mode);

	auto *bracket = app.add_subcommand("bracket", "coefficient of c in [b^(r)_m, b^(s)_n]");
	add_algebra_flags(bracket, a);
	bracket->add_option("--r", a.r);
	bracket->add_option("--s", a.s);
	bracket->add_option("--m", a.m)->required();
	bracket->add_option("--n", a.n)->required();

	auto *fock = app.add_subcommand("fock-apply", "apply a word of generators to a Fock state");
	add_algebra_flags(fock, a);
	fock->add_option("--word", a.word, "generators, rightmost acts first, e.g. \"b_2 b_-2\"")->required();
	fock->add_option("--state", a.state, "state, e.g. \"b(1)_-2 b(0)_-1\" (default: vacuum)");

	auto *phi = app.add_subcommand("phi-product", "phi-coordinated product b(q^r x)^e_n b(q^s x) on a Fock module");
	add_algebra_flags(phi, a);
	phi->add_option("--r", a.r);
	phi->add_option("--s", a.s);
	phi->add_option("--n", a.n)->required();
	phi->add_option("--p", a.p, "multiplier p(x1, x2) (default: catalog)");
	phi->add_option("--window", a.window_text, "exponent bound for the printout");

	bool list = false;
	auto *verify = app.add_subcommand("verify", "check laws on a window");
	verify->add_option("--law", a.laws, "law id (repeatable)");
	verify->add_flag("--list", list, "list law ids");
	add_run_flags(verify, a);

	auto *suite = app.add_subcommand("suite", "run every law");
	suite->add_option("name", a.suite, "paper-all (window 8) or fast (window 5)");
	add_run_flags(suite, a);

	std::vector<std::string> rev(args.rbegin(), args.rend());
	try
	{
		app.parse(rev);
	}
	catch (CLI::ParseError const &e)
	{
		int code = app.exit(e, out, err);
		return code == 0 ? kPass : kUsage;
	}

	try
	{
		a.mode.resolve();
		if (*expand)
			return cmd_expand(a, out);
		if (*bracket)
			return cmd_bracket(a, out);
		if (*fock)
			return cmd_fock_apply(a, out);
		if (*phi)
			return cmd_phi_product(a, out);
		if (*verify)
		{
			if (list)
			{
				for (auto const &id : law_catalog())
					fmt::print(out, "{:<20} {}\n", id, law_summary(id));
				return kPass;
			}
			if (a.laws.empty())
				throw Usage{"verify needs --law (or --list)", "verify"};
			return cmd_verify(a, out, err);
		}
		return cmd_suite(a, out, err);
	}
	catch (Usage const &u)
	{
		report_usage(u, args, err);
		return kUsage;
	}
	catch (DomainError const &e)
	{
		fmt::print(err, "error: {}\n", e.what());
		return kUsage;
	}
	catch (std::exception const &e)
	{
		fmt::print(err, "failed: {}\n", e.what());
		return kFail;
	}
}

} // namespace qheis::cli
