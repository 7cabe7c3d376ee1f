#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <random>

#include <CLI11.hpp>

#include "coulomb/classical_eikonal.hpp"
#include "coulomb/errors.hpp"
#include "coulomb/report.hpp"
#include "coulomb/sliced_propagator.hpp"
#include "coulomb/so4_harmonics.hpp"
#include "coulomb/spectral_engine.hpp"
#include "coulomb/sphere_geometry.hpp"
#include "coulomb/verification.hpp"
#include "coulomb/version.hpp"

namespace coulomb::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr const char* kMeasureNote =
    "measure density is 8 p_E^3/(p^2+p_E^2)^3; the uncubed denominator does not integrate to 2 pi^2";
constexpr const char* kSu2Note =
    "harmonics use the SU(2) embedding u = pi4 + i pi.sigma; phases of Y_nlm follow from this choice";
constexpr const char* kRadiusNote =
    "orbit checks use r = 2 alpha/(p^2+p_E^2), the form required by energy conservation";
constexpr const char* kSliceNote =
    "measure factor enters each slice as exp(-eps p_E^2 R/12), shifting n^2 - 1 to n^2";

Cell integer(long long v) { return static_cast<std::int64_t>(v); }

std::string join(const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ',';
        s += format_double(values[i]);
    }
    return s;
}

std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_plain(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw InvalidArgument("not a number: '" + std::string(s) + "'");
    }
    return v;
}

Momentum3 parse_momentum(const std::string& text) {
    const auto v = parse_number_list(text);
    if (v.size() != 3) throw InvalidArgument("momentum needs three components: '" + text + "'");
    return {{v[0], v[1], v[2]}};
}

std::string momentum_text(const Momentum3& p) { return join({p[0], p[1], p[2]}); }

SpherePoint4 random_sphere_point(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return SpherePoint4::normalized(g(rng), g(rng), g(rng), g(rng));
}

struct Common {
    std::string output = "-";
    std::string format = "json";
    std::string timestamp;
    double alpha = 1.0;
    double ev_unit = kHartreeEv;
};

void add_io(CLI::App* sub, Common& c) {
    sub->add_option("-o,--output", c.output, "report path, - for standard output")->capture_default_str();
    sub->add_option("--format", c.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sub->add_option("--timestamp", c.timestamp, "timestamp recorded in the report (default: current UTC time)");
}

void add_units(CLI::App* sub, Common& c) {
    sub->add_option("--alpha", c.alpha, "coupling strength")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--ev-unit", c.ev_unit, "eV per natural energy unit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

void echo_units(KeyValues& config, const Common& c) {
    config.emplace_back("alpha", c.alpha);
    config.emplace_back("ev_unit", c.ev_unit);
}

void echo_io(KeyValues& config, const Common& c) {
    config.emplace_back("format", c.format);
    config.emplace_back("output", c.output);
}

double level_energy(int n, double c, double alpha) { return -alpha * alpha / (2.0 * (n * n + 3.0 * c)); }

// Subcommand settings. Each handler echoes its resolved settings first, so
// the echo survives into the report when the computation fails.

struct SpectrumArgs {
    int n_max = 6;
    std::string c = "0";
};

int do_spectrum(const SpectrumArgs& a, const Common& common, ReportEnvelope& env) {
    const auto cs = parse_number_list(a.c);
    env.config = {{"n_max", integer(a.n_max)}, {"c", join(cs)}};
    echo_units(env.config, common);
    echo_io(env.config, common);

    Table t{"spectrum", {"c", "n", "energy", "energy_ev"}, {}};
    for (double c : cs) {
        for (const auto& e : spectrum(a.n_max, RTermVariant(c), common.alpha, common.ev_unit)) {
            t.rows.push_back({c, integer(e.n), e.energy, e.energy_ev});
        }
    }
    env.summary = {{"status", "ok"}, {"variants", integer(static_cast<long long>(cs.size()))},
                   {"levels", integer(static_cast<long long>(t.rows.size()))}};
    env.tables.push_back(std::move(t));
    return kExitOk;
}

struct PolesArgs {
    int n_max = 6;
    std::string c = "0";
    double energy_min = kNaN;
    double energy_max = kNaN;
    int grid = 2000;
    double tol = 1e-10;
};

int do_poles(const PolesArgs& a, const Common& common, ReportEnvelope& env) {
    const double c = parse_number(a.c);
    PoleScanConfig cfg;
    cfg.n_expect = a.n_max;
    cfg.variant = RTermVariant(c);
    cfg.alpha = common.alpha;
    cfg.scan_points = a.grid;
    cfg.energy_tol = a.tol;
    // Default window: a little below the ground level up to halfway between
    // the last requested level and the next one.
    cfg.energy_min = std::isnan(a.energy_min) ? 1.2 * level_energy(1, c, common.alpha) : a.energy_min;
    cfg.energy_max = std::isnan(a.energy_max)
                         ? 0.5 * (level_energy(a.n_max, c, common.alpha) + level_energy(a.n_max + 1, c, common.alpha))
                         : a.energy_max;
    env.config = {{"n_max", integer(a.n_max)}, {"c", format_double(c)},  {"energy_min", cfg.energy_min},
                  {"energy_max", cfg.energy_max}, {"grid", integer(a.grid)}, {"tol", a.tol}};
    echo_units(env.config, common);
    echo_io(env.config, common);

    const auto poles = find_poles(cfg);
    Table t{"poles", {"n", "energy", "analytic_energy", "abs_error", "probe_angle"}, {}};
    double worst = 0.0;
    for (const auto& p : poles) {
        const double exact = level_energy(p.n, c, common.alpha);
        worst = std::max(worst, std::abs(p.energy - exact));
        t.rows.push_back({integer(p.n), p.energy, exact, std::abs(p.energy - exact), p.probe_angle});
    }
    env.summary = {{"status", "ok"}, {"poles", integer(static_cast<long long>(poles.size()))},
                   {"max_abs_error", worst}};
    env.tables.push_back(std::move(t));
    return kExitOk;
}

struct AmplitudeArgs {
    double energy = -0.3;
    std::string theta = "0.5,1,1.5,2,2.5,3";
    std::string c = "0";
    double tol = 1e-10;
    int cesaro_terms = 100000;
};

int do_amplitude(const AmplitudeArgs& a, const Common& common, ReportEnvelope& env) {
    const auto thetas = parse_number_list(a.theta);
    const double c = parse_number(a.c);
    env.config = {{"energy", a.energy}, {"theta", join(thetas)},  {"c", format_double(c)},
                  {"tol", a.tol},       {"cesaro_terms", integer(a.cesaro_terms)}};
    echo_units(env.config, common);
    echo_io(env.config, common);

    const RTermVariant variant(c);
    Table t{"amplitude",
            {"theta", "value", "tail_bound", "terms", "cesaro_value", "cesaro_bound", "difference", "consistent"},
            {}};
    bool all_consistent = true;
    for (double theta : thetas) {
        const auto acc = fixed_energy_amplitude(theta, a.energy, common.alpha, variant, a.tol);
        const auto ces = fixed_energy_amplitude_cesaro(theta, a.energy, common.alpha, variant, a.cesaro_terms);
        const double diff = std::abs(acc.value - ces.value);
        const bool ok = diff <= acc.tail_bound + ces.tail_bound;
        all_consistent = all_consistent && ok;
        t.rows.push_back({theta, acc.value, acc.tail_bound, integer(acc.terms), ces.value, ces.tail_bound, diff, ok});
    }
    env.summary = {{"status", "ok"}, {"all_consistent", all_consistent}};
    env.tables.push_back(std::move(t));
    return kExitOk;
}

struct KernelArgs {
    std::string epsilon = "0.04,0.02,0.01";
    double pseudotime = 0.4;
    int grid = 256;
    int n_modes = 32;
    int n_max = 4;
    std::string c = "0";
    bool skip_measure_off = false;
    double tol = 5e-3;
};

int do_kernel(const KernelArgs& a, const Common& common, ReportEnvelope& env) {
    SpectrumSweep sweep;
    sweep.epsilons = parse_number_list(a.epsilon);
    sweep.total_pseudotime = a.pseudotime;
    sweep.grid_points = a.grid;
    sweep.n_modes = a.n_modes;
    sweep.n_levels = a.n_max;
    sweep.alpha = common.alpha;
    const auto cs = parse_number_list(a.c);
    env.config = {{"epsilon", join(sweep.epsilons)}, {"pseudotime", a.pseudotime},
                  {"grid", integer(a.grid)},         {"n_modes", integer(a.n_modes)},
                  {"n_max", integer(a.n_max)},       {"c", join(cs)},
                  {"measure_off", !a.skip_measure_off}, {"tol", a.tol}};
    echo_units(env.config, common);
    echo_io(env.config, common);
    env.warnings.emplace_back(kSliceNote);

    const auto report = discrimination_report(sweep, cs, !a.skip_measure_off, a.tol);
    Table levels{"levels",
                 {"c", "measure_factor", "n", "bound", "extracted_energy", "analytic_energy", "physical_energy",
                  "deviation_percent"},
                 {}};
    for (const auto& r : report.rows) {
        levels.rows.push_back({r.c, r.with_measure_factor, integer(r.n), r.bound, r.extracted_energy,
                               r.analytic_energy, r.physical_energy, r.deviation_percent});
    }
    Table verdicts{"verdicts",
                   {"c", "measure_factor", "has_ground_state", "ground_deviation_percent", "excluded"},
                   {}};
    long long excluded = 0;
    for (const auto& v : report.verdicts) {
        excluded += v.excluded ? 1 : 0;
        verdicts.rows.push_back(
            {v.c, v.with_measure_factor, v.has_ground_state, v.ground_deviation_percent, v.excluded});
    }
    env.summary = {{"status", "ok"},
                   {"configurations", integer(static_cast<long long>(report.verdicts.size()))},
                   {"excluded", integer(excluded)}};
    env.tables.push_back(std::move(levels));
    env.tables.push_back(std::move(verdicts));
    return kExitOk;
}

struct RtermArgs {
    std::string c = "0,1/24,1/12,1/8";
    int n_max = 3;
    double threshold = kSpectroscopicThreshold;
};

int do_rterm(const RtermArgs& a, const Common& common, ReportEnvelope& env) {
    const auto cs = parse_number_list(a.c);
    env.config = {{"c", join(cs)}, {"n_max", integer(a.n_max)}, {"threshold", a.threshold}};
    echo_units(env.config, common);
    echo_io(env.config, common);

    std::vector<RTermVariant> variants;
    for (double c : cs) variants.emplace_back(c);
    const auto report = level_spacing_report(variants, a.n_max, common.alpha, common.ev_unit, a.threshold);

    Table t{"levels",
            {"c", "n", "energy", "energy_ev", "spacing", "spacing_ev", "deviation", "spacing_deviation", "excluded"},
            {}};
    long long excluded = 0;
    for (const auto& v : report.verdicts) excluded += v.excluded ? 1 : 0;
    for (const auto& r : report.rows) {
        const auto it = std::find_if(report.verdicts.begin(), report.verdicts.end(),
                                     [&](const VariantVerdict& v) { return v.c == r.c; });
        const bool ex = it != report.verdicts.end() && it->excluded;
        t.rows.push_back({r.c, integer(r.n), r.energy, r.energy_ev, r.spacing, r.spacing_ev, r.deviation,
                          r.spacing_deviation, ex});
    }
    env.summary = {{"status", "ok"},
                   {"variants", integer(static_cast<long long>(cs.size()))},
                   {"excluded", integer(excluded)},
                   {"threshold", report.exclusion_threshold}};
    env.tables.push_back(std::move(t));
    return kExitOk;
}

struct EikonalArgs {
    std::string pa = "1,0,0";
    std::string pb = "0,1,0";
    double energy = -0.5;
    int n_points = MinimizerOptions{}.n_points;
    double tol = MinimizerOptions{}.gradient_tol;
    int max_iterations = MinimizerOptions{}.max_iterations;
    std::uint64_t seed = MinimizerOptions{}.seed;
    bool with_path = false;
};

int do_eikonal(const EikonalArgs& a, const Common& common, ReportEnvelope& env) {
    const Momentum3 pa = parse_momentum(a.pa);
    const Momentum3 pb = parse_momentum(a.pb);
    env.config = {{"pa", momentum_text(pa)},
                  {"pb", momentum_text(pb)},
                  {"energy", a.energy},
                  {"n_points", integer(a.n_points)},
                  {"tol", a.tol},
                  {"max_iterations", integer(a.max_iterations)},
                  {"seed", integer(static_cast<long long>(a.seed))},
                  {"with_path", a.with_path}};
    echo_units(env.config, common);
    echo_io(env.config, common);

    const EnergyContext ctx(a.energy, common.alpha, common.ev_unit);
    MinimizerOptions opt;
    opt.n_points = a.n_points;
    opt.gradient_tol = a.tol;
    opt.max_iterations = a.max_iterations;
    opt.seed = a.seed;
    const auto res = minimize_eikonal(pa, pb, ctx, opt);
    const double exact = geodesic_action(pa, pb, ctx);
    env.summary = {{"status", "ok"},
                   {"theta", invariant_angle(pb, pa, ctx)},
                   {"action", res.action},
                   {"geodesic_action", exact},
                   {"difference", res.action - exact},
                   {"initial_action", res.initial_action},
                   {"gradient_norm", res.gradient_norm},
                   {"normal_gradient_norm", res.normal_gradient_norm},
                   {"iterations", integer(res.iterations)},
                   {"restarted", res.restarted},
                   {"great_circle_deviation", great_circle_deviation(res.path(), ctx)}};
    if (a.with_path) {
        Table t{"path", {"i", "px", "py", "pz"}, {}};
        for (std::size_t i = 0; i < res.points.size(); ++i) {
            const auto& p = res.points[i];
            t.rows.push_back({integer(static_cast<long long>(i)), p[0], p[1], p[2]});
        }
        env.tables.push_back(std::move(t));
    }
    return kExitOk;
}

struct OrbitArgs {
    double energy = -0.5;
    double l_fraction = 0.8;
    double periods = 1.0;
    double dt_fraction = 1e-4;
    std::string integrator = "yoshida4";
    int samples = 0;
};

int do_orbit(const OrbitArgs& a, const Common& common, ReportEnvelope& env) {
    env.config = {{"energy", a.energy},           {"l_fraction", a.l_fraction},
                  {"periods", a.periods},         {"dt_fraction", a.dt_fraction},
                  {"integrator", a.integrator},   {"samples", integer(a.samples)}};
    echo_units(env.config, common);
    echo_io(env.config, common);
    env.warnings.emplace_back(kRadiusNote);

    const EnergyContext ctx(a.energy, common.alpha, common.ev_unit);
    const double alpha = common.alpha;
    const double l = a.l_fraction * alpha / ctx.p_e();
    const double period = kepler_period(a.energy, alpha);
    KeplerOptions opts;
    opts.integrator = a.integrator == "leapfrog" ? KeplerIntegrator::leapfrog : KeplerIntegrator::yoshida4;
    const auto states = simulate_kepler(a.energy, l, a.periods * period, a.dt_fraction * period, alpha, opts);

    double drift = 0.0, radius_err = 0.0;
    for (const auto& s : states) {
        drift = std::max(drift, std::abs(kepler_energy(s, alpha) - a.energy));
        const double r = std::hypot(s.position[0], s.position[1], s.position[2]);
        const double p2 = s.momentum[0] * s.momentum[0] + s.momentum[1] * s.momentum[1] +
                          s.momentum[2] * s.momentum[2];
        radius_err = std::max(radius_err, std::abs(alpha / r - 0.5 * (p2 + ctx.p_e_squared())));
    }
    auto up_to = [&](double t_end) {
        std::vector<KeplerState> part;
        for (const auto& s : states) {
            if (s.time > t_end * (1.0 + 1e-12)) break;
            part.push_back(s);
        }
        return part;
    };
    const auto quarter = eikonal_along_orbit(up_to(0.25 * period), ctx);
    const auto full = eikonal_along_orbit(up_to(period), ctx);
    const auto fit = fit_hodograph_circle(states);

    env.summary = {{"status", "ok"},
                   {"period", period},
                   {"angular_momentum", l},
                   {"eccentricity", std::sqrt(std::max(0.0, 1.0 + 2.0 * a.energy * l * l / (alpha * alpha)))},
                   {"steps", integer(static_cast<long long>(states.size()) - 1)},
                   {"max_energy_error", drift},
                   {"max_radius_relation_error", radius_err},
                   {"hodograph_center_x", fit.center_x},
                   {"hodograph_center_y", fit.center_y},
                   {"hodograph_radius", fit.radius},
                   {"hodograph_relative_residual", fit.max_residual / fit.radius},
                   {"quarter_canonical", quarter.canonical},
                   {"quarter_geometric", quarter.geometric},
                   {"quarter_relative_difference", quarter.relative_difference},
                   {"period_canonical", full.canonical},
                   {"period_geometric", full.geometric},
                   {"period_hodograph_angle", full.hodograph_angle},
                   {"period_expected", alpha / ctx.p_e() * full.hodograph_angle}};
    if (a.samples > 0 && !states.empty()) {
        Table t{"samples", {"t", "x", "y", "px", "py", "energy_error"}, {}};
        const std::size_t count = std::min(states.size(), static_cast<std::size_t>(a.samples));
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t i = count == 1 ? 0 : k * (states.size() - 1) / (count - 1);
            const auto& s = states[i];
            t.rows.push_back({s.time, s.position[0], s.position[1], s.momentum[0], s.momentum[1],
                              kepler_energy(s, alpha) - a.energy});
        }
        env.tables.push_back(std::move(t));
    }
    return kExitOk;
}

struct HarmonicsArgs {
    int n_max = 4;
    int addition_n_max = 6;
    int grid = 32;
    int pairs = 100;
    std::uint64_t seed = VerificationOptions{}.seed;
};

int do_harmonics(const HarmonicsArgs& a, const Common& common, ReportEnvelope& env) {
    env.config = {{"n_max", integer(a.n_max)},
                  {"addition_n_max", integer(a.addition_n_max)},
                  {"grid", integer(a.grid)},
                  {"pairs", integer(a.pairs)},
                  {"seed", integer(static_cast<long long>(a.seed))}};
    echo_io(env.config, common);
    env.warnings.emplace_back(kSu2Note);

    const double gram = orthonormality_error(a.n_max, a.grid);
    std::mt19937_64 rng(a.seed);
    std::vector<double> worst(static_cast<std::size_t>(a.addition_n_max), 0.0);
    for (int i = 0; i < a.pairs; ++i) {
        const auto x = random_sphere_point(rng);
        const auto y = random_sphere_point(rng);
        for (int n = 1; n <= a.addition_n_max; ++n) {
            auto& w = worst[static_cast<std::size_t>(n - 1)];
            w = std::max(w, addition_theorem_residual(n, y, x));
        }
    }
    Table t{"addition_theorem", {"n", "max_residual"}, {}};
    for (int n = 1; n <= a.addition_n_max; ++n) t.rows.push_back({integer(n), worst[static_cast<std::size_t>(n - 1)]});
    env.summary = {{"status", "ok"},
                   {"gram_error", gram},
                   {"addition_residual", worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end())}};
    env.tables.push_back(std::move(t));
    return kExitOk;
}

struct VerifyArgs {
    std::uint64_t seed = VerificationOptions{}.seed;
    int grid = VerificationOptions{}.harmonics_resolution;
    int pairs = VerificationOptions{}.random_pairs;
};

int do_verify(const VerifyArgs& a, const Common& common, ReportEnvelope& env) {
    env.config = {{"seed", integer(static_cast<long long>(a.seed))},
                  {"grid", integer(a.grid)},
                  {"pairs", integer(a.pairs)}};
    echo_io(env.config, common);
    env.warnings = {kMeasureNote, kSu2Note, kSliceNote, kRadiusNote};

    VerificationOptions opt;
    opt.seed = a.seed;
    opt.harmonics_resolution = a.grid;
    opt.random_pairs = a.pairs;
    const auto checks = run_verification_suite(opt);
    // Timings are left out so that identical settings give identical reports.
    Table t{"checks", {"name", "passed", "measured", "threshold", "detail"}, {}};
    long long failed = 0;
    for (const auto& c : checks) {
        failed += c.passed ? 0 : 1;
        t.rows.push_back({c.name, c.passed, c.measured, c.threshold, c.detail});
    }
    env.summary = {{"status", failed == 0 ? "ok" : "failed"},
                   {"checks", integer(static_cast<long long>(checks.size()))},
                   {"failed", integer(failed)},
                   {"all_passed", failed == 0}};
    env.tables.push_back(std::move(t));
    return failed == 0 ? kExitOk : kExitCheckFailed;
}

int write_report(const ReportEnvelope& env, const Common& common, std::ostream& out, std::ostream& err) {
    const std::string text = serialize_report(env, parse_report_format(common.format));
    if (common.output.empty() || common.output == "-") {
        out << text;
        out.flush();
        return out ? kExitOk : kExitIoError;
    }
    std::ofstream file(common.output, std::ios::binary | std::ios::trunc);
    if (file) file << text;
    if (file) file.flush();
    if (!file) {
        err << "coulomb: cannot write report to '" << common.output << "'\n";
        return kExitIoError;
    }
    return kExitOk;
}

}  // namespace

double parse_number(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_plain(text);
    const double num = parse_plain(text.substr(0, slash));
    const double den = parse_plain(text.substr(slash + 1));
    if (den == 0.0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
    return num / den;
}

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        if (trim(item).empty()) throw InvalidArgument("empty item in list '" + std::string(text) + "'");
        out.push_back(parse_number(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Momentum-space Coulomb problem on the three-sphere", "coulomb"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    Common common;
    using Handler = std::function<int(ReportEnvelope&)>;
    std::vector<std::pair<CLI::App*, Handler>> commands;

    SpectrumArgs spectrum_args;
    {
        auto* s = app.add_subcommand("spectrum", "closed-form levels E_n = -alpha^2 / 2(n^2 + 3c)");
        s->add_option("--n-max", spectrum_args.n_max, "highest level")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--c", spectrum_args.c, "comma list of c values, fractions allowed")->capture_default_str();
        add_units(s, common);
        add_io(s, common);
        commands.emplace_back(s, [&](ReportEnvelope& e) { return do_spectrum(spectrum_args, common, e); });
    }
    PolesArgs poles_args;
    {
        auto* s = app.add_subcommand("poles", "locate poles of the fixed-energy amplitude");
        s->add_option("--n-max", poles_args.n_max, "number of poles to locate")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--c", poles_args.c, "curvature-term coefficient")->capture_default_str();
        s->add_option("--energy-min", poles_args.energy_min, "lower end of the scan (default 1.2 E_1)");
        s->add_option("--energy-max", poles_args.energy_max, "upper end of the scan (default between E_n and E_n+1)");
        s->add_option("--grid", poles_args.grid, "scan points")->check(CLI::Range(16, 10000000))->capture_default_str();
        s->add_option("--tol", poles_args.tol, "bisection tolerance in energy")->check(CLI::PositiveNumber)->capture_default_str();
        add_units(s, common);
        add_io(s, common);
        commands.emplace_back(s, [&](ReportEnvelope& e) { return do_poles(poles_args, common, e); });
    }
    AmplitudeArgs amplitude_args;
    {
        auto* s = app.add_subcommand("amplitude", "fixed-energy amplitude, accelerated and Cesaro sums");
        s->add_option("--energy", amplitude_args.energy, "energy E < 0")->capture_default_str();
        s->add_option("--theta", amplitude_args.theta, "comma list of separation angles")->capture_default_str();
        s->add_option("--c", amplitude_args.c, "curvature-term coefficient")->capture_default_str();
        s->add_option("--tol", amplitude_args.tol, "tail bound target")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--cesaro-terms", amplitude_args.cesaro_terms, "terms in the Cesaro mean")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        add_units(s, common);
        add_io(s, common);
        commands.emplace_back(s, [&](ReportEnvelope& e) { return do_amplitude(amplitude_args, common, e); });
    }
    KernelArgs kernel_args;
    {
        auto* s = app.add_subcommand("kernel", "time-sliced propagator: levels extracted from the eps sweep");
        s->add_option("--epsilon", kernel_args.epsilon, "comma list of slice widths")->capture_default_str();
        s->add_option("--pseudotime", kernel_args.pseudotime, "total pseudotime")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--grid", kernel_args.grid, "angular grid points")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--n-modes", kernel_args.n_modes, "retained harmonic modes")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--n-max", kernel_args.n_max, "levels to extract")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--c", kernel_args.c, "comma list of c values")->capture_default_str();
        s->add_flag("--skip-measure-off", kernel_args.skip_measure_off, "omit the run without the measure factor");
        s->add_option("--tol", kernel_args.tol, "tolerance on extracted energies")->check(CLI::PositiveNumber)->capture_default_str();
        add_units(s, common);
        add_io(s, common);
        commands.emplace_back(s, [&](ReportEnvelope& e) { return do_kernel(kernel_args, common, e); });
    }
    RtermArgs rterm_args;
    {
        auto* s = app.add_subcommand("rterm", "level and spacing distortion from a c R/2 term");
        s->add_option("--c", rterm_args.c, "comma list of c values, fractions allowed")->capture_default_str();
        s->add_option("--n-max", rterm_args.n_max, "highest level")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--threshold", rterm_args.threshold, "relative distortion counted as excluded")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        add_units(s, common);
        add_io(s, common);
        commands.emplace_back(s, [&](ReportEnvelope& e) { return do_rterm(rterm_args, common, e); });
    }
    EikonalArgs eikonal_args;
    {
        auto* s = app.add_subcommand("eikonal", "minimize the momentum-space eikonal between two momenta");
        s->add_option("--pa", eikonal_args.pa, "start momentum x,y,z")->capture_default_str();
        s->add_option("--pb", eikonal_args.pb, "end momentum x,y,z")->capture_default_str();
        s->add_option("--energy", eikonal_args.energy, "energy E < 0")->capture_default_str();
        s->add_option("--n-points", eikonal_args.n_points, "path points")->check(CLI::Range(3, 1 << 20))->capture_default_str();
        s->add_option("--tol", eikonal_args.tol, "gradient max-norm tolerance")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--max-iterations", eikonal_args.max_iterations, "iteration cap per level")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        s->add_option("--seed", eikonal_args.seed, "seed for the perturbed restart")->capture_default_str();
        s->add_flag("--with-path", eikonal_args.with_path, "include the optimized path");
        add_units(s, common);
        add_io(s, common);
        commands.emplace_back(s, [&](ReportEnvelope& e) { return do_eikonal(eikonal_args, common, e); });
    }
    OrbitArgs orbit_args;
    {
        auto* s = app.add_subcommand("orbit", "Kepler orbit, hodograph and eikonal along it");
        s->add_option("--energy", orbit_args.energy, "energy E < 0")->capture_default_str();
        s->add_option("--l-fraction", orbit_args.l_fraction, "angular momentum as a fraction of the circular value")
            ->check(CLI::Range(std::numeric_limits<double>::min(), 1.0))
            ->capture_default_str();
        s->add_option("--periods", orbit_args.periods, "duration in periods")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--dt-fraction", orbit_args.dt_fraction, "step as a fraction of the period")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        s->add_option("--integrator", orbit_args.integrator, "time stepper")
            ->check(CLI::IsMember({"leapfrog", "yoshida4"}))
            ->capture_default_str();
        s->add_option("--samples", orbit_args.samples, "rows of the sampled trajectory table")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        add_units(s, common);
        add_io(s, common);
        commands.emplace_back(s, [&](ReportEnvelope& e) { return do_orbit(orbit_args, common, e); });
    }
    HarmonicsArgs harmonics_args;
    {
        auto* s = app.add_subcommand("harmonics-check", "orthonormality and addition theorem of Y_nlm");
        s->add_option("--n-max", harmonics_args.n_max, "highest n in the Gram matrix")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--addition-n-max", harmonics_args.addition_n_max, "highest n for the addition theorem")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        s->add_option("--grid", harmonics_args.grid, "quadrature points per coordinate")
            ->check(CLI::Range(S3Grid::kMinResolution, 4096))
            ->capture_default_str();
        s->add_option("--pairs", harmonics_args.pairs, "random point pairs")->check(CLI::PositiveNumber)->capture_default_str();
        s->add_option("--seed", harmonics_args.seed, "random seed")->capture_default_str();
        add_io(s, common);
        commands.emplace_back(s, [&](ReportEnvelope& e) { return do_harmonics(harmonics_args, common, e); });
    }
    VerifyArgs verify_args;
    {
        auto* s = app.add_subcommand("verify-all", "run the full invariant suite");
        s->add_option("--seed", verify_args.seed, "random seed")->capture_default_str();
        s->add_option("--grid", verify_args.grid, "harmonics quadrature resolution")
            ->check(CLI::Range(S3Grid::kMinResolution, 4096))
            ->capture_default_str();
        s->add_option("--pairs", verify_args.pairs, "addition-theorem pairs")->check(CLI::PositiveNumber)->capture_default_str();
        add_io(s, common);
        commands.emplace_back(s, [&](ReportEnvelope& e) { return do_verify(verify_args, common, e); });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidConfig;
    }

    for (auto& [sub, handler] : commands) {
        if (!sub->parsed()) continue;
        ReportEnvelope env;
        env.version = kVersion;
        env.command = sub->get_name();
        env.timestamp = common.timestamp.empty() ? now_utc() : common.timestamp;
        int code = kExitOk;
        try {
            code = handler(env);
        } catch (const NonConvergence& e) {
            env.summary = {{"status", "non_convergence"}, {"error", e.what()}, {"residual", e.residual()}};
            env.tables.clear();
            code = kExitNonConvergence;
        } catch (const ResolutionError& e) {
            env.summary = {{"status", "resolution_error"}, {"error", e.what()}};
            env.tables.clear();
            code = kExitNonConvergence;
        } catch (const Error& e) {
            err << "coulomb " << env.command << ": " << e.what() << '\n';
            return kExitInvalidConfig;
        }
        const int written = write_report(env, common, out, err);
        return written != kExitOk ? written : code;
    }
    return kExitInvalidConfig;
}

}  // namespace coulomb::cli
