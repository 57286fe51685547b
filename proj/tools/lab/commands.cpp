#include "lab/commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "biharmonic/determinant.hpp"
#include "biharmonic/dynamics.hpp"
#include "biharmonic/estimates.hpp"
#include "biharmonic/norms.hpp"
#include "lab/io.hpp"

namespace lab {

using json = nlohmann::ordered_json;
namespace bh = biharmonic;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// nlohmann writes NaN/inf as null; keep them visible instead.
json num(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

json header(const Provenance& p) {
    json j;
    j["subcommand"] = p.subcommand;
    j["config_hash"] = hex64(p.config_hash);
    j["seed"] = p.seed;
    return j;
}

void emit_json(const std::filesystem::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

std::vector<bh::SpectralParameter> lattice(double kappa0, std::int64_t lo, std::int64_t hi) {
    std::vector<bh::SpectralParameter> k;
    for (std::int64_t n = lo; n <= hi; ++n) k.push_back(bh::SpectralParameter::lattice(kappa0, n));
    return k;
}

bh::SpectralField determinant_field(const bh::SpectralField& f, std::size_t points) {
    return f.size() > points ? bh::resample(f, points) : f;
}

struct Kappa0 {
    double value = 1.0;
    bool chosen = false;
    bh::Kappa0Choice choice;
};

Kappa0 resolve_kappa0(const LabConfig& c, const bh::SpectralField& f) {
    Kappa0 k;
    if (c.determinant.kappa0 > 0) {
        k.value = c.determinant.kappa0;
        return k;
    }
    k.choice = bh::choose_kappa0(determinant_field(f, c.determinant.points), c.determinant.s,
                                 c.determinant.q, c.determinant.delta, c.determinant.n_lo, c.determinant.n_hi);
    k.value = k.choice.kappa0;
    k.chosen = true;
    return k;
}

json kappa0_json(const Kappa0& k) {
    json j;
    j["value"] = k.value;
    j["chosen"] = k.chosen;
    if (k.chosen) {
        j["max_hs"] = num(k.choice.max_hs);
        j["delta"] = num(k.choice.delta);
        json h = json::array();
        for (const auto& [k0, hs] : k.choice.history) h.push_back({k0, num(hs)});
        j["history"] = h;
    }
    return j;
}

std::string conservation_csv(const Provenance& p, const bh::ConservationReport& r) {
    CsvWriter csv(p, {"t", "n", "kappa_re", "kappa_im", "alpha", "hs", "drift", "criterion_met"});
    for (const auto& s : r.series) {
        const double a0 = s.alpha.front();
        for (std::size_t t = 0; t < r.times.size(); ++t) {
            csv.cell(r.times[t])
                .cell(static_cast<std::int64_t>(s.kappa.lattice_index().value_or(0)))
                .cell(s.kappa.re())
                .cell(s.kappa.im())
                .cell(s.alpha[t])
                .cell(s.hs[t])
                .cell(std::abs(s.alpha[t] - a0) / std::max(std::abs(a0), 1e-14))
                .cell(s.hs[t] <= 0.5);
            csv.end_row();
        }
    }
    return csv.text();
}

json conservation_json(const bh::ConservationReport& r) {
    json j;
    j["mass_drift"] = num(r.mass_drift);
    j["all_criteria_met"] = r.all_criteria_met;
    double worst = 0.0, max_mod = 0.0;
    for (double m : r.modulation) max_mod = std::max(max_mod, m);
    json series = json::array();
    for (const auto& s : r.series) {
        json e;
        e["n"] = s.kappa.lattice_index().value_or(0);
        e["kappa"] = {s.kappa.re(), s.kappa.im()};
        e["drift"] = num(s.drift);
        double max_hs = 0.0;
        for (double h : s.hs) max_hs = std::max(max_hs, h);
        e["max_hs"] = num(max_hs);
        e["hs_margin"] = num(0.5 - max_hs);
        e["criterion_met"] = s.criterion_met;
        series.push_back(e);
        worst = std::max(worst, s.drift);
    }
    j["max_alpha_drift"] = num(worst);
    if (!r.modulation.empty())
        j["modulation_sup_ratio"] = num(r.modulation.front() > 0 ? max_mod / r.modulation.front() : 0.0);
    j["kappas"] = series;
    return j;
}

std::string conservation_svg(const Provenance& p, const bh::ConservationReport& r) {
    std::vector<Series> series;
    for (const auto& s : r.series) {
        Series e;
        e.label = "n = " + std::to_string(s.kappa.lattice_index().value_or(0));
        const double a0 = s.alpha.front();
        for (std::size_t t = 1; t < r.times.size(); ++t) {
            e.x.push_back(r.times[t]);
            e.y.push_back(std::abs(s.alpha[t] - a0) / std::max(std::abs(a0), 1e-14));
        }
        series.push_back(std::move(e));
    }
    if (series.size() > 5) series.resize(5);
    return loglog_svg(p, "relative alpha drift", "t", "|alpha(t) - alpha(0)| / |alpha(0)|", series);
}

int run_simulate(const LabConfig& c, const Provenance& p, const RunOptions& o, std::ostream& out,
                 std::ostream& err) {
    const bh::SpectralGrid grid(c.box_length, c.points);
    const bh::SpectralField initial = bh::make_initial_data(grid, c.data);
    const Kappa0 k0 = resolve_kappa0(c, initial);
    const auto kappas = lattice(k0.value, c.determinant.n_lo, c.determinant.n_hi);

    bh::SimulationConfig sc;
    sc.box_length = c.box_length;
    sc.points = c.points;
    sc.data = c.data;
    sc.dt = c.dt;
    sc.horizon = c.horizon;
    sc.record_every = c.record_every;
    sc.physics = c.physics;
    sc.line_guard = c.line_guard;
    sc.diagnostics.kappas = kappas;
    sc.diagnostics.s = c.determinant.s;
    sc.diagnostics.q = c.determinant.q;
    sc.diagnostics.z_kappa0 = c.determinant.z_kappa0;
    sc.diagnostics.determinant_points = c.determinant.points;

    json summary = header(p);
    summary["kappa0"] = kappa0_json(k0);
    bh::Trajectory traj;
    try {
        traj = bh::simulate(initial, sc);
    } catch (const bh::BlowUpError& e) {
        summary["status"] = "blow-up";
        summary["blow_up_time"] = num(e.time());
        summary["message"] = e.what();
        emit_json(o.out / "summary.json", summary);
        err << "blow-up guard: " << e.what() << "\n";
        return kBlowUp;
    }

    CsvWriter csv(p, {"t", "mass", "sup", "sobolev", "modulation", "z"});
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& d = traj.diagnostics[i];
        csv.cell(traj.times[i])
            .cell(d.mass)
            .cell(bh::lebesgue_norm(traj.fields[i], bh::kInfinity))
            .cell(d.sobolev)
            .cell(d.modulation)
            .cell(d.z);
        csv.end_row();
    }
    write_file(o.out / "trajectory.csv", csv.text());

    json tj = header(p);
    tj["box_length"] = grid.box_length();
    tj["points"] = grid.size();
    tj["dt"] = traj.dt;
    tj["ordering"] = "fft";
    json kj = json::array();
    for (const auto& k : kappas) kj.push_back({{"n", k.lattice_index().value_or(0)}, {"re", k.re()}, {"im", k.im()}});
    tj["kappas"] = kj;
    json snaps = json::array();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        json s;
        s["t"] = traj.times[i];
        if (c.output.spectra) {
            json spec = json::array();
            for (const auto& v : traj.fields[i].spectrum()) spec.push_back({v.real(), v.imag()});
            s["spectrum"] = std::move(spec);
        }
        snaps.push_back(std::move(s));
    }
    tj["snapshots"] = std::move(snaps);
    emit_json(o.out / "trajectory.json", tj);

    const bh::ConservationReport report = bh::conservation_report(traj, kappas);
    write_file(o.out / "conservation.csv", conservation_csv(p, report));
    if (o.plot || c.output.plot) write_file(o.out / "conservation.svg", conservation_svg(p, report));

    summary["status"] = report.all_criteria_met ? "ok" : "criterion-violation";
    summary["steps"] = static_cast<std::uint64_t>(std::llround(c.horizon / traj.dt));
    summary["dt"] = traj.dt;
    summary["snapshots"] = traj.times.size();
    summary["conservation"] = conservation_json(report);
    emit_json(o.out / "summary.json", summary);

    double worst = 0.0;
    for (const auto& s : report.series) worst = std::max(worst, s.drift);
    out << "simulate: " << traj.times.size() << " snapshots, kappa0 = " << format_double(k0.value)
        << ", max alpha drift = " << format_double(worst) << ", mass drift = " << format_double(report.mass_drift)
        << "\n";
    if (!report.all_criteria_met) {
        err << "kappa criterion hs <= 1/2 violated; see conservation.csv\n";
        return kCriterion;
    }
    return kOk;
}

int run_alpha(const LabConfig& c, const Provenance& p, const RunOptions& o, std::ostream& out,
              std::ostream& err) {
    const bh::SpectralGrid grid(c.box_length, c.points);
    const bh::SpectralField field = determinant_field(bh::make_initial_data(grid, c.data), c.determinant.points);
    const Kappa0 k0 = resolve_kappa0(c, field);
    const auto& d = c.determinant;
    const bh::LatticeProfile prof =
        bh::alpha_lattice_profile(field, k0.value, d.s, d.q, d.delta, d.n_lo, d.n_hi, d.both_paths);

    CsvWriter csv(p, {"n", "kappa_re", "kappa_im", "alpha", "alpha_series", "agreement", "tail_bound", "leading",
                      "residual", "hs", "converged"});
    bool all = true;
    double max_hs = 0.0, worst_excess = -bh::kInfinity;
    for (const auto& r : prof.rows) {
        const double agreement = d.both_paths ? std::abs(r.alpha - r.alpha_series) : kNaN;
        csv.cell(r.n)
            .cell(prof.kappa0)
            .cell(0.5 * static_cast<double>(r.n))
            .cell(r.alpha)
            .cell(r.alpha_series)
            .cell(agreement)
            .cell(d.both_paths ? r.tail_bound : kNaN)
            .cell(r.leading)
            .cell(r.residual)
            .cell(r.hs)
            .cell(r.converged);
        csv.end_row();
        all = all && r.converged;
        max_hs = std::max(max_hs, r.hs);
        if (d.both_paths && r.converged) worst_excess = std::max(worst_excess, agreement - r.tail_bound - 1e-10);
    }
    write_file(o.out / "alpha_profile.csv", csv.text());

    json j = header(p);
    j["kappa0"] = kappa0_json(k0);
    j["s"] = d.s;
    j["q"] = d.q;
    j["delta"] = num(prof.delta);
    j["n_range"] = {d.n_lo, d.n_hi};
    j["method"] = d.both_paths ? "both" : "logdet";
    j["max_hs"] = num(max_hs);
    j["hs_margin"] = num(0.5 - max_hs);
    j["all_converged"] = all;
    j["residual_norm"] = num(prof.residual_norm);
    j["comparison"] = num(prof.comparison);
    j["leading_z"] = num(prof.leading_z);
    j["tolerances"] = {{"hs_criterion", 0.5}, {"agreement", "tail_bound + 1e-10"}};
    if (d.both_paths) {
        j["agreement_within_tolerance"] = worst_excess <= 0.0;
        j["worst_agreement_excess"] = num(worst_excess);
    }
    emit_json(o.out / "alpha_summary.json", j);
    if (o.plot || c.output.plot) {
        Series lead{"leading term", {}, {}, false}, res{"|residual|", {}, {}, true};
        for (const auto& r : prof.rows) {
            const double x = 1.0 + std::abs(static_cast<double>(r.n));
            lead.x.push_back(x), lead.y.push_back(std::abs(r.leading));
            res.x.push_back(x), res.y.push_back(std::abs(r.residual));
        }
        write_file(o.out / "alpha_profile.svg", loglog_svg(p, "alpha lattice profile", "1 + |n|", "value", {lead, res}));
    }

    out << "alpha: " << prof.rows.size() << " lattice points, kappa0 = " << format_double(prof.kappa0)
        << ", max hs = " << format_double(max_hs) << "\n";
    if (!all) {
        err << "kappa criterion hs <= 1/2 violated at some n; rows flagged in alpha_profile.csv\n";
        return kCriterion;
    }
    return kOk;
}

int run_norms(const LabConfig& c, const Provenance& p, const RunOptions& o, std::ostream& out, std::ostream&) {
    const bh::SpectralGrid grid(c.box_length, c.points);
    const bh::SpectralField field = bh::make_initial_data(grid, c.data);
    const auto& n = c.norms;

    const bh::BoxProfile boxes = bh::box_l2_profile(field);
    CsvWriter csv(p, {"n", "box_l2", "weighted"});
    for (std::size_t i = 0; i < boxes.values.size(); ++i) {
        const double centre = static_cast<double>(boxes.first + static_cast<std::int64_t>(i));
        csv.cell(boxes.first + static_cast<std::int64_t>(i))
            .cell(boxes.values[i])
            .cell(std::pow(1.0 + centre * centre, 0.5 * n.s) * boxes.values[i]);
        csv.end_row();
    }
    write_file(o.out / "boxes.csv", csv.text());

    json j = header(p);
    j["mass"] = num(std::pow(bh::lebesgue_norm(field, 2.0), 2));
    json leb = json::array();
    for (double e : n.lebesgue) leb.push_back({{"p", num(e)}, {"value", num(bh::lebesgue_norm(field, e))}});
    j["lebesgue"] = leb;
    j["sobolev"] = {{"s", n.s}, {"value", num(bh::sobolev_norm(field, n.s))},
                    {"homogeneous", num(bh::sobolev_norm(field, n.s, true))}};
    const double mod = bh::modulation_norm(boxes, n.s, n.q);
    j["modulation"] = {{"s", n.s}, {"q", n.q}, {"value", num(mod)}};
    if (n.s < 1.0 - 1.0 / n.q) {
        const bh::ZNormResult z = bh::z_norm_detail(bh::z_profile(field, n.kappa0), n.s, n.q);
        j["z"] = {{"s", n.s}, {"q", n.q}, {"kappa0", n.kappa0}, {"value", num(z.value)}, {"tail_bound", num(z.tail)},
                  {"ratio_to_modulation", num(mod > 0 ? z.value / mod : kNaN)}};
    } else {
        j["z"] = {{"skipped", "requires s < 1 - 1/q"}};
    }
    emit_json(o.out / "norms.json", j);
    out << "norms: modulation = " << format_double(mod) << "\n";
    return kOk;
}

std::string sweep_csv(const Provenance& p, const bh::SweepReport& r) {
    CsvWriter csv(p, {r.parameter_name, "sample", "ratio", "horizon"});
    for (std::size_t i = 0; i < r.parameters.size(); ++i)
        for (std::size_t k = 0; k < r.ratios[i].size(); ++k) {
            csv.cell(r.parameters[i]).cell(static_cast<std::int64_t>(k)).cell(r.ratios[i][k]).cell(r.horizons[i]);
            csv.end_row();
        }
    return csv.text();
}

json sweep_json(const Provenance& p, const bh::SweepReport& r) {
    json j = header(p);
    j["name"] = r.name;
    j["parameter"] = r.parameter_name;
    j["parameters"] = r.parameters;
    json means = json::array();
    for (double m : r.means()) means.push_back(num(m));
    j["geometric_means"] = means;
    json hz = json::array();
    for (double h : r.horizons) hz.push_back(num(h));
    j["horizons"] = hz;
    j["slope"] = num(r.slope);
    j["slope_stderr"] = num(r.slope_stderr);
    j["slope_ci95"] = {num(r.slope - 1.96 * r.slope_stderr), num(r.slope + 1.96 * r.slope_stderr)};
    j["intercept"] = num(r.intercept);
    j["max_ratio"] = num(r.max_ratio);
    j["ensemble"] = r.ensemble;
    j["calibration_error"] = num(r.calibration_error);
    return j;
}

std::string sweep_svg(const Provenance& p, const bh::SweepReport& r) {
    Series samples{"samples", {}, {}, true}, mean{"geometric mean", {}, {}, false},
        fit{"fit: slope " + format_double(std::round(r.slope * 1e4) / 1e4), {}, {}, false};
    const auto m = r.means();
    for (std::size_t i = 0; i < r.parameters.size(); ++i) {
        for (double v : r.ratios[i]) samples.x.push_back(r.parameters[i]), samples.y.push_back(v);
        mean.x.push_back(r.parameters[i]), mean.y.push_back(m[i]);
        fit.x.push_back(r.parameters[i]);
        fit.y.push_back(std::exp(r.intercept + r.slope * std::log(r.parameters[i])));
    }
    return loglog_svg(p, r.name, r.parameter_name, "ratio", {samples, mean, fit});
}

int run_sweep(const LabConfig& c, const Provenance& p, const RunOptions& o, std::ostream& out, std::ostream&) {
    bh::SweepReport r;
    switch (c.subcommand) {
        case Subcommand::sweep_strichartz: {
            auto s = c.strichartz;
            s.seed = p.seed;
            r = bh::strichartz_sweep(s);
            break;
        }
        case Subcommand::sweep_bilinear: {
            auto s = c.bilinear;
            s.seed = p.seed;
            r = bh::bilinear_sweep(s);
            break;
        }
        default: {
            auto s = c.l4;
            s.seed = p.seed;
            r = bh::l4_interval_sweep(s);
        }
    }
    write_file(o.out / "sweep.csv", sweep_csv(p, r));
    emit_json(o.out / "sweep.json", sweep_json(p, r));
    if (o.plot || c.output.plot) write_file(o.out / "sweep.svg", sweep_svg(p, r));
    out << r.name << ": slope = " << format_double(r.slope) << " +- " << format_double(r.slope_stderr)
        << ", max ratio = " << format_double(r.max_ratio) << "\n";
    return kOk;
}

int run_conservation(const LabConfig& c, const Provenance& p, const RunOptions& o, std::ostream& out,
                     std::ostream& err) {
    std::ifstream in(c.trajectory, std::ios::binary);
    if (!in) {
        err << c.trajectory << ": cannot open trajectory\n";
        return kBadConfig;
    }
    json tj;
    try {
        tj = json::parse(in);
    } catch (const json::exception& e) {
        err << c.trajectory << ": " << e.what() << "\n";
        return kBadConfig;
    }
    bh::Trajectory traj;
    std::vector<bh::SpectralParameter> kappas;
    try {
        const bh::SpectralGrid grid(tj.at("box_length").get<double>(), tj.at("points").get<std::size_t>());
        traj.dt = tj.at("dt").get<double>();
        for (const auto& s : tj.at("snapshots")) {
            if (!s.contains("spectrum")) throw std::invalid_argument("trajectory was written without spectra");
            std::vector<bh::cplx> spec;
            for (const auto& v : s.at("spectrum")) spec.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
            if (spec.size() != grid.size()) throw std::invalid_argument("spectrum length does not match points");
            traj.times.push_back(s.at("t").get<double>());
            traj.fields.push_back(bh::synthesize(std::move(spec), grid));
        }
        if (c.determinant.kappa0 > 0) {
            kappas = lattice(c.determinant.kappa0, c.determinant.n_lo, c.determinant.n_hi);
        } else {
            for (const auto& k : tj.at("kappas"))
                kappas.push_back(bh::SpectralParameter::lattice(k.at("re").get<double>(), k.at("n").get<std::int64_t>()));
        }
    } catch (const std::exception& e) {
        err << c.trajectory << ": " << e.what() << "\n";
        return kBadConfig;
    }
    if (traj.fields.empty()) {
        err << c.trajectory << ": no snapshots\n";
        return kBadConfig;
    }

    const bh::ConservationReport report = bh::conservation_report(traj, kappas);
    write_file(o.out / "conservation.csv", conservation_csv(p, report));
    if (o.plot || c.output.plot) write_file(o.out / "conservation.svg", conservation_svg(p, report));
    json j = header(p);
    j["trajectory"] = c.trajectory;
    j["source_config_hash"] = tj.value("config_hash", "");
    j["conservation"] = conservation_json(report);
    emit_json(o.out / "conservation.json", j);
    out << "conservation-report: " << traj.times.size() << " snapshots, " << kappas.size() << " kappas\n";
    if (!report.all_criteria_met) {
        err << "kappa criterion hs <= 1/2 violated; see conservation.csv\n";
        return kCriterion;
    }
    return kOk;
}

}  // namespace

int run(const LabConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
    LabConfig c = config;
    if (options.seed) {
        c.seed = *options.seed;
        c.data.seed = *options.seed;
    }
    const Provenance p{std::string(subcommand_name(c.subcommand)), c.config_hash, c.seed};
    try {
        std::filesystem::create_directories(options.out);
        switch (c.subcommand) {
            case Subcommand::simulate: return run_simulate(c, p, options, out, err);
            case Subcommand::alpha: return run_alpha(c, p, options, out, err);
            case Subcommand::norms: return run_norms(c, p, options, out, err);
            case Subcommand::conservation_report: return run_conservation(c, p, options, out, err);
            default: return run_sweep(c, p, options, out, err);
        }
    } catch (const std::invalid_argument& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return kBadConfig;
    } catch (const std::domain_error& e) {
        // Numerically singular I - K: the kappa is far outside the criterion.
        err << "determinant: " << e.what() << "\n";
        return kCriterion;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kBadConfig;
    }
}

int run(Subcommand subcommand, const std::string& config_text, const std::string& config_name,
        const RunOptions& options, std::ostream& out, std::ostream& err) {
    LabConfig c;
    try {
        c = parse_config(config_text, subcommand);
    } catch (const ConfigError& e) {
        err << config_name << ":" << e.line() << ":" << e.column() << ": " << e.message() << "\n";
        return kBadConfig;
    }
    return run(c, options, out, err);
}

}  // namespace lab
