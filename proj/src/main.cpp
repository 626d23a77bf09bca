// fpf: gap probabilities of Pfaffian point processes and their growth
// coefficients, with Monte Carlo and particle-system cross checks.
//
// Exit codes: 0 success, 2 numerical failure, 3 statistical rejection
// (some |z| > 4), 64 usage error.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpf/density.hpp"
#include "fpf/fredholm.hpp"
#include "fpf/io.hpp"
#include "fpf/kappa.hpp"
#include "fpf/kernel.hpp"
#include "fpf/particles.hpp"
#include "fpf/rng.hpp"
#include "fpf/walks.hpp"
#include "fpf/zeros.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 2;
constexpr int kExitStatistical = 3;
constexpr int kExitUsage = 64;

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "a:b:n" inclusive linspace, or a comma list, or a single value.
std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        double a = 0, b = 0;
        long n = 0;
        char c1 = 0, c2 = 0;
        std::istringstream is(s);
        if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
            throw CliError("bad grid '" + s + "' (want a:b:n)");
        for (long j = 0; j < n; ++j)
            out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1));
        return out;
    }
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream is(t);
    double v;
    while (is >> v) out.push_back(v);
    if (out.empty()) throw CliError("bad grid '" + s + "'");
    return out;
}

struct CommonOpts {
    std::string kernel = "sech";
    std::vector<double> p_list;
    std::string p_grid;
    double t = 0.5;
    double theta = 1.0;
    double lambda = 1.0;
    std::string L_grid;
    std::size_t N = 400;
    std::string route = "all";
    std::uint64_t n_paths = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_path;
    std::string format;
    bool edge = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--kernel", o.kernel,
                    "kernel/density: sech|gauss|persistence|poisson|gps|exit");
    cmd->add_option("--p", o.p_list, "thinning parameter(s) in (0,1]");
    cmd->add_option("--p-grid", o.p_grid, "thinning grid a:b:n");
    cmd->add_option("--t", o.t, "diffusion time of the gauss/poisson kernels");
    cmd->add_option("--theta", o.theta, "annihilation probability / poisson rate share");
    cmd->add_option("--lambda", o.lambda, "poisson kernel intensity");
    cmd->add_option("--L-grid", o.L_grid, "window sizes, a:b:n or comma list");
    cmd->add_option("--N", o.N, "quadrature nodes per window");
    cmd->add_option("--route", o.route, "series|fourier|closed|all");
    cmd->add_option("--n-paths", o.n_paths, "Monte Carlo sample count");
    cmd->add_option("--dt", o.dt, "particle time step");
    cmd->add_option("--seed", o.seed, "RNG seed (generated and echoed when absent)");
    cmd->add_option("--out", o.out_path, "output file (default stdout)");
    cmd->add_option("--format", o.format, "csv|json (default by extension)");
    cmd->add_flag("--edge", o.edge, "use the half-space kernel of the density");
}

fpf::OutFormat resolve_format(const CommonOpts& o, fpf::OutFormat dflt) {
    if (o.format == "csv") return fpf::OutFormat::csv;
    if (o.format == "json") return fpf::OutFormat::json;
    if (!o.format.empty()) throw CliError("unknown --format '" + o.format + "'");
    if (o.out_path.size() >= 5 && o.out_path.substr(o.out_path.size() - 5) == ".json")
        return fpf::OutFormat::json;
    if (o.out_path.size() >= 4 && o.out_path.substr(o.out_path.size() - 4) == ".csv")
        return fpf::OutFormat::csv;
    return dflt;
}

std::vector<double> resolve_p(const CommonOpts& o, double dflt = 0.5) {
    if (!o.p_list.empty() && !o.p_grid.empty())
        throw CliError("give either --p or --p-grid, not both");
    if (!o.p_grid.empty()) return parse_grid(o.p_grid);
    if (!o.p_list.empty()) return o.p_list;
    return {dflt};
}

fpf::StepDensity make_density(const CommonOpts& o) {
    if (o.kernel == "sech") return fpf::StepDensity::sech();
    if (o.kernel == "gauss") return fpf::StepDensity::gaussian(o.t);
    if (o.kernel == "persistence") return fpf::StepDensity::persistence();
    if (o.kernel == "poisson")
        return fpf::StepDensity::poisson_smoothed(o.lambda, o.theta, o.t);
    throw CliError("kernel '" + o.kernel + "' has no step density; valid here: "
                   "sech|gauss|persistence|poisson");
}

// Output sink: file or stdout.
class Sink {
  public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

std::uint64_t ensure_seed(CommonOpts& o) {
    if (!o.seed_given && o.seed == 0) {
        std::random_device rd;
        o.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        if (o.seed == 0) o.seed = 1;
    }
    return o.seed;
}

const char* regime_name(fpf::Regime r) {
    switch (r) {
        case fpf::Regime::subcritical: return "subcritical";
        case fpf::Regime::critical: return "critical";
        default: return "supercritical";
    }
}

// ---------------------------------------------------------------------------
// kappa
// ---------------------------------------------------------------------------

fpf::KappaResult kappa_one(const CommonOpts& o, const std::string& route, double p) {
    using fpf::StepDensity;
    if (route == "closed") {
        if (o.edge && o.kernel != "persistence")
            throw CliError("no closed half-space coefficients for kernel '" + o.kernel + "'");
        if (o.kernel == "sech") return fpf::kappa_sech_closed(p);
        if (o.kernel == "gauss") return fpf::kappa_gauss_closed(p, o.t);
        if (o.kernel == "persistence") return fpf::kappa_persistence_closed(p);
        throw CliError("no closed form for kernel '" + o.kernel + "'");
    }
    if (route == "series") {
        if (o.kernel == "persistence" || o.edge)
            return fpf::kappa_edge_series(make_density(o), p);
        return fpf::kappa_bulk_series(make_density(o), p);
    }
    if (route == "fourier") {
        if (o.kernel == "persistence" || o.edge)
            throw CliError("the Fourier route covers translation-invariant kernels only");
        return fpf::kappa_bulk_fourier(make_density(o), p);
    }
    throw CliError("unknown route '" + route + "'");
}

int cmd_kappa(CommonOpts& o, const std::string& cmdline) {
    if (o.kernel == "gps" || o.kernel == "exit")
        throw CliError("kernel '" + o.kernel + "' has no kappa coefficients; "
                       "use the eval or sim commands");
    std::vector<std::string> routes;
    if (o.route == "all") {
        routes = {"series"};
        if (o.kernel != "persistence" && !o.edge) routes.push_back("fourier");
        if (o.kernel == "sech" || o.kernel == "gauss" || o.kernel == "persistence")
            if (!o.edge || o.kernel == "persistence") routes.push_back("closed");
    } else {
        routes = {o.route};
    }

    std::vector<fpf::TableRow> rows;
    for (double p : resolve_p(o))
        for (const auto& r : routes) {
            fpf::KappaResult k;
            try {
                k = kappa_one(o, r, p);
            } catch (const std::domain_error&) {
                // Route-specific domain edge (e.g. series at p = 1, where only
                // the closed form extends): skip silently on "all", but an
                // explicitly requested route still reports the error.
                if (o.route == "all") continue;
                throw;
            }
            rows.push_back({p, k.kappa1, k.kappa2, std::string(regime_name(k.regime)),
                            r, k.est_error});
        }
    if (rows.empty()) throw CliError("no route covers the requested p values");

    fpf::RunSpec spec;
    spec.command_line = cmdline;
    spec.seed = o.seed;
    spec.tolerances = "series truncation adaptive, est_error column reports the tail bound";
    spec.format = resolve_format(o, fpf::OutFormat::csv);
    Sink sink(o.out_path);
    fpf::write_table(sink.os(), spec, {"p", "kappa1", "kappa2", "regime", "route", "est_error"},
                     rows);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval / fit
// ---------------------------------------------------------------------------

struct EvalRow {
    std::string kernel;
    double p, L;
    std::size_t N;
    fpf::EvalResult r;
};

std::vector<EvalRow> run_eval(const CommonOpts& o) {
    std::vector<EvalRow> rows;
    const auto ps = resolve_p(o);
    if (o.kernel == "gps") {
        // Window (-1+2eps, 1-2eps); L is its hyperbolic length log((1-eps)/eps).
        if (o.L_grid.empty()) throw CliError("gps eval needs --L-grid of eps values");
        auto K = fpf::derived(fpf::scalar_gps());
        for (double p : ps)
            for (double eps : parse_grid(o.L_grid)) {
                if (!(eps > 0 && eps < 0.5)) throw CliError("gps eps must lie in (0,1/2)");
                auto r = fpf::fpf_direct(K, p, -1 + 2 * eps, 1 - 2 * eps, o.N);
                rows.push_back({"gps", p, std::log((1 - eps) / eps), o.N, r});
            }
        return rows;
    }
    if (o.kernel == "exit") {
        // Windows (a, a e^{2u}) for u in the L grid; L column is u.
        if (o.L_grid.empty()) throw CliError("exit eval needs --L-grid of log-scale lengths");
        auto K = fpf::derived(fpf::scalar_exit(fpf::ExitInit::maximal));
        const double a = 1.0;
        for (double p : ps)
            for (double u : parse_grid(o.L_grid)) {
                if (!(u > 0)) throw CliError("exit eval needs positive window lengths");
                auto r = fpf::fpf_direct(K, p, a, a * std::exp(2 * u), o.N);
                rows.push_back({"exit", p, u, o.N, r});
            }
        return rows;
    }

    if (o.L_grid.empty()) throw CliError("eval needs --L-grid");
    const auto Ls = parse_grid(o.L_grid);
    const auto rho = make_density(o);
    // The persistence density is one-sided, so its gap window is always the
    // half-line form regardless of --edge.
    const bool edge = o.edge || o.kernel == "persistence";
    const std::string name = o.kernel + (edge && o.kernel != "persistence" ? "-edge" : "");
    if (edge) {
        auto K = fpf::scalar_edge(rho);
        for (double p : ps)
            for (double L : Ls)
                rows.push_back({name, p, L, o.N, fpf::fpf_edge(K, p, L, std::nullopt, o.N)});
    } else {
        auto K = fpf::scalar_bulk(rho);
        for (double p : ps)
            for (double L : Ls)
                rows.push_back({name, p, L, o.N, fpf::fpf_tw(K, p, 0.0, L, o.N)});
    }
    return rows;
}

int cmd_eval(CommonOpts& o, const std::string& cmdline) {
    auto rows = run_eval(o);
    std::vector<fpf::TableRow> out;
    for (const auto& e : rows)
        out.push_back({e.kernel, e.p, e.L, static_cast<double>(e.N), e.r.log_value,
                       e.r.richardson_error});
    fpf::RunSpec spec;
    spec.command_line = cmdline;
    spec.seed = o.seed;
    spec.tolerances = "richardson_error = |log at N - log at N/2|";
    spec.format = resolve_format(o, fpf::OutFormat::csv);
    Sink sink(o.out_path);
    fpf::write_table(sink.os(), spec,
                     {"kernel", "p", "L", "N", "log_pf", "richardson_error"}, out);
    return kExitOk;
}

struct FitPoint {
    double p, L, logv;
};

std::vector<FitPoint> read_eval_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    std::vector<std::string> header;
    std::vector<FitPoint> pts;
    long iP = -1, iL = -1, iV = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream is(line);
        std::string cell;
        while (std::getline(is, cell, ',')) cells.push_back(cell);
        if (header.empty()) {
            header = cells;
            for (std::size_t j = 0; j < header.size(); ++j) {
                if (header[j] == "p") iP = static_cast<long>(j);
                if (header[j] == "L") iL = static_cast<long>(j);
                if (header[j] == "log_pf") iV = static_cast<long>(j);
            }
            if (iL < 0 || iV < 0)
                throw std::runtime_error("'" + path + "' lacks L/log_pf columns");
            continue;
        }
        const double p =
            iP < 0 ? std::nan("") : std::stod(cells[static_cast<std::size_t>(iP)]);
        pts.push_back({p, std::stod(cells[static_cast<std::size_t>(iL)]),
                       std::stod(cells[static_cast<std::size_t>(iV)])});
    }
    return pts;
}

int cmd_fit(CommonOpts& o, const std::string& in_path, bool with_log, double max_residual,
            const std::string& cmdline) {
    std::vector<FitPoint> pts;
    if (!in_path.empty()) {
        pts = read_eval_csv(in_path);
    } else {
        for (const auto& e : run_eval(o)) pts.push_back({e.p, e.L, e.r.log_value});
    }
    // One fit per p value, in order of first appearance.
    std::vector<double> ps;
    for (const auto& pt : pts) {
        bool seen = false;
        for (double q : ps)
            if (q == pt.p || (std::isnan(q) && std::isnan(pt.p))) seen = true;
        if (!seen) ps.push_back(pt.p);
    }

    std::vector<fpf::TableRow> rows;
    double worst = 0.0;
    for (double pv : ps) {
        std::vector<std::pair<double, double>> group;
        for (const auto& pt : pts)
            if (pt.p == pv || (std::isnan(pv) && std::isnan(pt.p)))
                group.emplace_back(pt.L, pt.logv);
        if (group.size() < 3) throw CliError("fit needs at least three window sizes per p");
        auto fit = fpf::fit_asymptote(group, with_log);
        worst = std::max(worst, fit.residual);

        // Reference coefficients from the closed route when the catalogue has
        // one, else the series route.
        const double p = std::isnan(pv) ? resolve_p(o).front() : pv;
        double k1_ref = std::nan(""), k2_ref = std::nan("");
        try {
            fpf::KappaResult ref;
            if (o.kernel == "gps" || o.kernel == "exit") {
                // Both push forward to the stationary sech process (hyperbolic
                // / logarithmic coordinates); the L column of eval is already
                // the stationary window length.
                ref = fpf::kappa_sech_closed(p);
            } else if (o.kernel == "sech" && !o.edge) {
                ref = fpf::kappa_sech_closed(p);
            } else if (o.kernel == "gauss" && !o.edge) {
                ref = fpf::kappa_gauss_closed(p, o.t);
            } else if (o.kernel == "persistence" || o.edge) {
                ref = fpf::kappa_edge_series(make_density(o), p);
            } else {
                ref = fpf::kappa_bulk_series(make_density(o), p);
            }
            k1_ref = ref.kappa1;
            k2_ref = ref.kappa2;
        } catch (const std::exception&) {
            // reference unavailable: report the fit alone
        }
        rows.push_back({o.kernel, p, fit.kappa1_hat, fit.kappa2_hat, fit.log_coeff_hat,
                        fit.residual, k1_ref, k2_ref, fit.kappa1_hat - k1_ref,
                        fit.kappa2_hat - k2_ref});
    }

    fpf::RunSpec spec;
    spec.command_line = cmdline;
    spec.seed = o.seed;
    spec.tolerances = "max fit residual " + std::to_string(max_residual);
    spec.format = resolve_format(o, fpf::OutFormat::json);
    Sink sink(o.out_path);
    fpf::write_table(sink.os(), spec,
                     {"kernel", "p", "kappa1_hat", "kappa2_hat", "log_coeff_hat", "residual",
                      "kappa1_ref", "kappa2_ref", "dkappa1", "dkappa2"},
                     rows);
    if (!(worst <= max_residual)) {
        std::cerr << "fit: residual " << worst << " exceeds " << max_residual << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// mc / sim / zeros
// ---------------------------------------------------------------------------

int cmd_mc(CommonOpts& o, std::string identity, double beta, double L,
           const std::string& cmdline) {
    fpf::WalkConfig cfg;
    cfg.rho = make_density(o);
    cfg.n_paths = o.n_paths ? o.n_paths : 100000;
    cfg.seed = ensure_seed(o);
    cfg.beta = beta;
    cfg.p = resolve_p(o, 0.75).front();
    cfg.L = L;

    std::vector<std::pair<std::string, fpf::HitStats>> results;
    auto want = [&](const char* n) { return identity == n || identity == "all"; };
    if (want("sparre-andersen")) results.emplace_back("sparre-andersen", fpf::check_sparre_andersen(cfg));
    if (want("spitzer")) results.emplace_back("spitzer", fpf::check_spitzer(cfg));
    if (want("gambler")) results.emplace_back("gambler", fpf::check_gambler(cfg));
    if (want("tilted")) results.emplace_back("tilted", fpf::check_tilted_limit(cfg));
    if (results.empty())
        throw CliError("unknown identity '" + identity +
                       "' (sparre-andersen|spitzer|gambler|tilted|all)");

    std::vector<fpf::TableRow> rows;
    bool reject = false;
    for (const auto& [name, st] : results) {
        rows.push_back({name, st.estimate, st.reference, st.se, st.z,
                        static_cast<double>(st.n_paths), static_cast<double>(st.n_censored)});
        if (std::abs(st.z) > 4.0) reject = true;
    }
    fpf::RunSpec spec;
    spec.command_line = cmdline;
    spec.seed = o.seed;
    spec.tolerances = "reject when |z| > 4";
    spec.format = resolve_format(o, fpf::OutFormat::csv);
    Sink sink(o.out_path);
    fpf::write_table(sink.os(), spec,
                     {"identity", "estimate", "reference", "se", "z", "n_paths", "n_censored"},
                     rows);
    return reject ? kExitStatistical : kExitOk;
}

struct SlopeFit {
    double slope = 0.0, se = 0.0;
};

// Weighted least-squares slope of y against x (weights 1/se^2).
SlopeFit ls_slope(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& se) {
    double sw = 0, swx = 0;
    std::vector<double> w(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        w[i] = 1.0 / (se[i] * se[i]);
        sw += w[i];
        swx += w[i] * x[i];
    }
    const double xbar = swx / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * y[i];
    }
    return {sxy / sxx, std::sqrt(1.0 / sxx)};
}

int cmd_sim(CommonOpts& o, std::string observable, double L, double a, double W,
            const std::string& cmdline) {
    const std::uint64_t seed = ensure_seed(o);
    const std::uint64_t n_real = o.n_paths ? o.n_paths : 10000;
    const double p_theta = 1.0 / (1.0 + o.theta);
    std::vector<fpf::TableRow> rows;
    bool reject = false;

    if (observable == "gap") {
        const double dt = o.dt > 0 ? o.dt : 5e-4;
        const double pad = 2.0 + 6.0 * std::sqrt(2.0 * o.t);
        fpf::InitSpec init{fpf::InitKind::maximal, 0.0, -pad, L + pad};
        std::uint64_t empty = 0;
        for (std::uint64_t r = 0; r < n_real; ++r) {
            auto st = fpf::simulate_cabm(o.theta, init, o.t, dt, seed + r);
            bool occupied = false;
            for (double x : st.x)
                if (x > 0.0 && x < L) { occupied = true; break; }
            if (!occupied) ++empty;
        }
        const double p_hat = static_cast<double>(empty) / static_cast<double>(n_real);
        const double se = std::sqrt(std::max(p_hat * (1 - p_hat), 1e-300) /
                                    static_cast<double>(n_real));
        auto K = fpf::scalar_bulk(fpf::StepDensity::gaussian(o.t));
        const double ref = std::exp(fpf::fpf_tw(K, p_theta, 0.0, L, o.N).log_value);
        const double z = (p_hat - ref) / se;
        rows.push_back({std::string("gap"), o.t, p_hat, ref, se, z});
        if (std::abs(z) > 4) reject = true;
    } else if (observable == "exit") {
        const double dt = o.dt > 0 ? o.dt : 2e-3;
        std::vector<double> Ts = o.L_grid.empty() ? std::vector<double>{2.0, 8.0, 32.0}
                                                  : parse_grid(o.L_grid);
        std::sort(Ts.begin(), Ts.end());
        const double t_max = Ts.back();
        fpf::InitSpec init{fpf::InitKind::maximal, 0.0, a, a + W};
        std::vector<std::uint64_t> alive(Ts.size(), 0);
        for (std::uint64_t r = 0; r < n_real; ++r) {
            auto rec = fpf::simulate_exit(o.theta, init, t_max, dt, seed + r);
            for (std::size_t j = 0; j < Ts.size(); ++j)
                if (!rec.crossed || rec.first_crossing_time > Ts[j]) ++alive[j];
        }
        std::vector<double> xs, ys, ses;
        for (std::size_t j = 0; j < Ts.size(); ++j) {
            const double ph = static_cast<double>(alive[j]) / static_cast<double>(n_real);
            if (!(ph > 0)) throw std::runtime_error("no surviving realizations at T grid point");
            const double se = std::sqrt(ph * (1 - ph) / static_cast<double>(n_real));
            rows.push_back({std::string("hole"), Ts[j], ph, std::nan(""), se, std::nan("")});
            xs.push_back(std::log(2.0 * Ts[j] / (a * a)));
            ys.push_back(std::log(ph));
            ses.push_back(se / ph);
        }
        if (Ts.size() >= 2) {
            auto sf = ls_slope(xs, ys, ses);
            const double ref = -0.5 * fpf::kappa_persistence_closed(p_theta).kappa1;
            const double z = (sf.slope - ref) / sf.se;
            rows.push_back({std::string("slope"), std::nan(""), sf.slope, ref, sf.se, z});
            if (std::abs(z) > 4) reject = true;
        }
    } else {
        throw CliError("unknown observable '" + observable + "' (gap|exit)");
    }

    fpf::RunSpec spec;
    spec.command_line = cmdline;
    spec.seed = o.seed;
    spec.tolerances = "reject when |z| > 4";
    spec.format = resolve_format(o, fpf::OutFormat::csv);
    Sink sink(o.out_path);
    fpf::write_table(sink.os(), spec, {"name", "x", "estimate", "reference", "se", "z"}, rows);
    return reject ? kExitStatistical : kExitOk;
}

int cmd_zeros(CommonOpts& o, std::vector<double> eps_list, const std::string& cmdline) {
    const std::uint64_t seed = ensure_seed(o);
    const std::uint64_t n_real = o.n_paths ? o.n_paths : 20000;
    if (eps_list.empty()) eps_list = {0.1, 0.05};

    const double k2_ref = fpf::kappa_sech_closed(0.5).kappa2;
    std::vector<fpf::TableRow> rows;
    std::vector<double> ell, logp, selogp;
    for (std::size_t j = 0; j < eps_list.size(); ++j) {
        auto st = fpf::gps_zeros(eps_list[j], n_real, seed + j);
        // The level reference is the asymptote; only the slope is testable
        // at this sample size, so the level z is reported but not enforced.
        const double ref = std::exp(-0.375 * st.log_length + k2_ref);
        const double z = (st.p_hat - ref) / st.se;
        rows.push_back({std::string("hole"), st.eps, st.p_hat, ref, st.se, z});
        ell.push_back(st.log_length);
        logp.push_back(std::log(st.p_hat));
        selogp.push_back(st.se / st.p_hat);
    }
    bool reject = false;
    if (eps_list.size() >= 2) {
        auto sf = ls_slope(ell, logp, selogp);
        const double z = (sf.slope - (-0.375)) / sf.se;
        rows.push_back({std::string("slope"), std::nan(""), sf.slope, -0.375, sf.se, z});
        if (std::abs(z) > 4) reject = true;
    }

    fpf::RunSpec spec;
    spec.command_line = cmdline;
    spec.seed = o.seed;
    spec.tolerances = "reject when slope |z| > 4; hole levels are informational";
    spec.format = resolve_format(o, fpf::OutFormat::csv);
    Sink sink(o.out_path);
    fpf::write_table(sink.os(), spec, {"name", "x", "estimate", "reference", "se", "z"}, rows);
    return reject ? kExitStatistical : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fpf: Fredholm Pfaffian gap probabilities, their growth coefficients, "
                 "and stochastic cross checks"};
    app.require_subcommand(1);
    const std::string cmdline = join_args(argc, argv);

    CommonOpts o;

    auto* kappa = app.add_subcommand("kappa", "growth coefficients kappa1/kappa2 by route");
    add_common(kappa, o);

    auto* eval = app.add_subcommand("eval", "log gap probability over a window grid");
    add_common(eval, o);

    auto* fit = app.add_subcommand("fit", "fit -kappa1 L + kappa2 (+ c log L) to eval output");
    add_common(fit, o);
    std::string in_path;
    bool with_log = false;
    double max_residual = 1e-3;
    fit->add_option("--in", in_path, "eval CSV to consume (default: run eval internally)");
    fit->add_flag("--with-log", with_log, "include a log L term in the fit");
    fit->add_option("--max-residual", max_residual, "residual threshold for exit status");

    auto* mc = app.add_subcommand("mc", "random-walk identity checks");
    add_common(mc, o);
    std::string identity = "all";
    double beta = 0.75, gambler_L = 10.0;
    mc->add_option("--identity", identity, "sparre-andersen|spitzer|gambler|tilted|all");
    mc->add_option("--beta", beta, "discount factor in (0,1)");
    mc->add_option("--L", gambler_L, "gambler's-ruin height");

    auto* sim = app.add_subcommand("sim", "interacting-particle observables");
    add_common(sim, o);
    std::string observable = "gap";
    double sim_L = 2.0, exit_a = 1.0, exit_W = 30.0;
    sim->add_option("--observable", observable, "gap|exit");
    sim->add_option("--L", sim_L, "gap window (0, L)");
    sim->add_option("--a", exit_a, "exit: vacuum width at the boundary");
    sim->add_option("--W", exit_W, "exit: initial occupied width (a, a+W)");

    auto* zeros = app.add_subcommand("zeros", "hole probabilities of random-series zeros");
    add_common(zeros, o);
    std::vector<double> eps_list;
    zeros->add_option("--eps", eps_list, "window parameters in (0,1/2); default 0.1 0.05");

    // seed presence must be tracked for the echo-generated-seed contract
    for (auto* cmd : {kappa, eval, fit, mc, sim, zeros})
        cmd->get_option("--seed")->each([&o](const std::string&) { o.seed_given = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(kappa)) return cmd_kappa(o, cmdline);
        if (app.got_subcommand(eval)) return cmd_eval(o, cmdline);
        if (app.got_subcommand(fit)) return cmd_fit(o, in_path, with_log, max_residual, cmdline);
        if (app.got_subcommand(mc)) return cmd_mc(o, identity, beta, gambler_L, cmdline);
        if (app.got_subcommand(sim)) return cmd_sim(o, observable, sim_L, exit_a, exit_W, cmdline);
        if (app.got_subcommand(zeros)) return cmd_zeros(o, eps_list, cmdline);
    } catch (const CliError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
