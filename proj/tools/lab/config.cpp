#include "lab/config.hpp"

#include <cmath>
#include <set>
#include <utility>

#include <json.hpp>

#include "lab/io.hpp"

namespace lab {

using json = nlohmann::ordered_json;

namespace {

constexpr std::pair<Subcommand, std::string_view> kNames[] = {
    {Subcommand::simulate, "simulate"},
    {Subcommand::alpha, "alpha"},
    {Subcommand::norms, "norms"},
    {Subcommand::sweep_strichartz, "sweep-strichartz"},
    {Subcommand::sweep_bilinear, "sweep-bilinear"},
    {Subcommand::sweep_l4, "sweep-l4"},
    {Subcommand::conservation_report, "conservation-report"},
};

// Minimal JSON skipper used only to map schema errors back to positions. The
// document has already been parsed successfully when this runs.
struct Scanner {
    std::string_view t;

    std::size_t ws(std::size_t i) const {
        while (i < t.size() && (t[i] == ' ' || t[i] == '\t' || t[i] == '\n' || t[i] == '\r')) ++i;
        return i;
    }
    std::size_t string_end(std::size_t i) const {  // i at the opening quote
        for (++i; i < t.size(); ++i) {
            if (t[i] == '\\') ++i;
            else if (t[i] == '"') return i + 1;
        }
        return t.size();
    }
    std::size_t value_end(std::size_t i) const {
        i = ws(i);
        if (i >= t.size()) return i;
        if (t[i] == '"') return string_end(i);
        if (t[i] == '{' || t[i] == '[') {
            int depth = 0;
            for (; i < t.size(); ++i) {
                if (t[i] == '"') i = string_end(i) - 1;
                else if (t[i] == '{' || t[i] == '[') ++depth;
                else if ((t[i] == '}' || t[i] == ']') && --depth == 0) return i + 1;
            }
            return i;
        }
        while (i < t.size() && t[i] != ',' && t[i] != '}' && t[i] != ']' && t[i] != ' ' &&
               t[i] != '\n' && t[i] != '\r' && t[i] != '\t')
            ++i;
        return i;
    }

    std::optional<std::size_t> find(std::size_t i, const std::vector<std::string>& path,
                                    std::size_t depth) const {
        i = ws(i);
        if (depth == path.size()) return i;
        if (i >= t.size()) return std::nullopt;
        if (t[i] == '{') {
            i = ws(i + 1);
            while (i < t.size() && t[i] == '"') {
                const std::size_t key_at = i;
                const std::size_t key_end = string_end(i);
                const std::string_view key = t.substr(key_at + 1, key_end - key_at - 2);
                std::size_t v = ws(key_end);
                if (v < t.size() && t[v] == ':') ++v;
                if (key == path[depth]) {
                    if (depth + 1 == path.size()) return key_at;
                    return find(v, path, depth + 1);
                }
                i = ws(value_end(v));
                if (i < t.size() && t[i] == ',') i = ws(i + 1);
            }
            return std::nullopt;
        }
        if (t[i] == '[') {
            std::size_t index = 0;
            try {
                index = std::stoul(path[depth]);
            } catch (const std::exception&) {
                return std::nullopt;
            }
            i = ws(i + 1);
            for (std::size_t k = 0; i < t.size() && t[i] != ']'; ++k) {
                if (k == index) return find(i, path, depth + 1);
                i = ws(value_end(i));
                if (i < t.size() && t[i] == ',') i = ws(i + 1);
            }
        }
        return std::nullopt;
    }
};

std::string join(const std::vector<std::string>& path) {
    std::string s;
    for (const auto& p : path) s += "/" + p;
    return s.empty() ? "/" : s;
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& message) const {
        // Fall back to the nearest enclosing element that can be located.
        auto p = path;
        std::optional<std::size_t> at;
        while (!(at = locate(text_, p)) && !p.empty()) p.pop_back();
        const auto [line, column] = line_column(text_, at.value_or(0));
        throw ConfigError(join(path) + ": " + message, line, column);
    }

    void keys(const json& obj, const std::vector<std::string>& path,
              std::initializer_list<std::string_view> allowed) const {
        if (!obj.is_object()) fail(path, "expected an object");
        for (const auto& [key, value] : obj.items()) {
            bool ok = false;
            for (const auto a : allowed) ok = ok || key == a;
            if (!ok) {
                auto p = path;
                p.push_back(key);
                fail(p, "unknown key '" + key + "'");
            }
        }
    }

    const json* child(const json& obj, const std::string& key) const {
        const auto it = obj.find(key);
        return it == obj.end() ? nullptr : &*it;
    }

    static std::vector<std::string> at(std::vector<std::string> path, const std::string& key) {
        path.push_back(key);
        return path;
    }

    void number(const json& obj, const std::vector<std::string>& path, const std::string& key,
                double& out) const {
        if (const json* v = child(obj, key)) out = as_number(*v, at(path, key));
    }

    double as_number(const json& v, const std::vector<std::string>& path) const {
        if (v.is_number()) return v.get<double>();
        if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity"))
            return biharmonic::kInfinity;
        fail(path, "expected a number");
    }

    void integer(const json& obj, const std::vector<std::string>& path, const std::string& key,
                 std::int64_t& out) const {
        const json* v = child(obj, key);
        if (!v) return;
        if (!v->is_number_integer()) fail(at(path, key), "expected an integer");
        out = v->get<std::int64_t>();
    }

    void count(const json& obj, const std::vector<std::string>& path, const std::string& key,
               std::size_t& out) const {
        const json* v = child(obj, key);
        if (!v) return;
        if (!v->is_number_unsigned()) fail(at(path, key), "expected a non-negative integer");
        out = v->get<std::size_t>();
    }

    void seed(const json& obj, const std::vector<std::string>& path, const std::string& key,
              std::uint64_t& out) const {
        const json* v = child(obj, key);
        if (!v) return;
        if (!v->is_number_unsigned()) fail(at(path, key), "expected a non-negative integer");
        out = v->get<std::uint64_t>();
    }

    void boolean(const json& obj, const std::vector<std::string>& path, const std::string& key,
                 bool& out) const {
        const json* v = child(obj, key);
        if (!v) return;
        if (!v->is_boolean()) fail(at(path, key), "expected true or false");
        out = v->get<bool>();
    }

    void string(const json& obj, const std::vector<std::string>& path, const std::string& key,
                std::string& out, std::initializer_list<std::string_view> choices = {}) const {
        const json* v = child(obj, key);
        if (!v) return;
        if (!v->is_string()) fail(at(path, key), "expected a string");
        out = v->get<std::string>();
        if (choices.size() == 0) return;
        std::string list;
        for (const auto c : choices) {
            if (out == c) return;
            list += (list.empty() ? "" : ", ") + std::string(c);
        }
        fail(at(path, key), "expected one of " + list);
    }

    void numbers(const json& obj, const std::vector<std::string>& path, const std::string& key,
                 std::vector<double>& out) const {
        const json* v = child(obj, key);
        if (!v) return;
        const auto p = at(path, key);
        if (!v->is_array() || v->empty()) fail(p, "expected a non-empty array of numbers");
        out.clear();
        for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_number((*v)[i], at(p, std::to_string(i))));
    }

    void require(bool ok, const std::vector<std::string>& path, const std::string& message) const {
        if (!ok) fail(path, message);
    }

private:
    std::string_view text_;
};

void read_grid(const Reader& r, const json& j, LabConfig& c) {
    const std::vector<std::string> p = {"grid"};
    r.keys(j, p, {"box_length", "points"});
    r.number(j, p, "box_length", c.box_length);
    r.count(j, p, "points", c.points);
    r.require(std::isfinite(c.box_length) && c.box_length > 0, Reader::at(p, "box_length"), "must be positive");
    r.require(c.points >= 8 && c.points % 2 == 0, Reader::at(p, "points"), "must be even and >= 8");
}

void read_data(const Reader& r, const json& j, LabConfig& c) {
    const std::vector<std::string> p = {"data"};
    r.keys(j, p, {"profile", "amplitude", "width", "center", "wavenumber", "band"});
    r.string(j, p, "profile", c.data.profile, {"zero", "gaussian", "plane_wave", "packet"});
    r.number(j, p, "amplitude", c.data.amplitude);
    r.number(j, p, "width", c.data.width);
    r.number(j, p, "center", c.data.center);
    r.number(j, p, "wavenumber", c.data.wavenumber);
    r.number(j, p, "band", c.data.band);
    r.require(std::isfinite(c.data.amplitude), Reader::at(p, "amplitude"), "must be finite");
    r.require(c.data.width > 0 && std::isfinite(c.data.width), Reader::at(p, "width"), "must be positive");
    r.require(c.data.band > 0 && std::isfinite(c.data.band), Reader::at(p, "band"), "must be positive");
}

void read_physics(const Reader& r, const json& j, LabConfig& c) {
    const std::vector<std::string> p = {"physics"};
    r.keys(j, p, {"beta", "gamma", "weights", "nonlinear", "padding", "dt", "horizon", "record_every",
                  "line_guard"});
    auto& k = c.physics.coefficients;
    r.number(j, p, "beta", k.beta);
    r.number(j, p, "gamma", k.gamma);
    if (r.child(j, "weights")) {
        std::vector<double> w;
        r.numbers(j, p, "weights", w);
        r.require(w.size() == 6, Reader::at(p, "weights"), "expected 6 weights a1..a6");
        k.weights = {w[0], w[1], w[2], w[3], w[4], w[5]};
    }
    r.boolean(j, p, "nonlinear", c.physics.nonlinear);
    std::int64_t padding = c.physics.padding;
    r.integer(j, p, "padding", padding);
    r.require(padding >= 1 && padding <= 4, Reader::at(p, "padding"), "must be in 1..4");
    c.physics.padding = static_cast<int>(padding);
    r.number(j, p, "dt", c.dt);
    r.number(j, p, "horizon", c.horizon);
    r.count(j, p, "record_every", c.record_every);
    r.boolean(j, p, "line_guard", c.line_guard);
    r.require(std::isfinite(c.dt) && c.dt > 0, Reader::at(p, "dt"), "must be positive");
    r.require(std::isfinite(c.horizon) && c.horizon >= 0, Reader::at(p, "horizon"), "must be non-negative");
    r.require(c.record_every >= 1, Reader::at(p, "record_every"), "must be >= 1");
}

void read_determinant(const Reader& r, const json& j, LabConfig& c) {
    const std::vector<std::string> p = {"determinant"};
    r.keys(j, p, {"kappa0", "n_lo", "n_hi", "s", "q", "delta", "method", "points", "z_kappa0"});
    auto& d = c.determinant;
    r.number(j, p, "kappa0", d.kappa0);
    r.integer(j, p, "n_lo", d.n_lo);
    r.integer(j, p, "n_hi", d.n_hi);
    r.number(j, p, "s", d.s);
    r.number(j, p, "q", d.q);
    r.number(j, p, "delta", d.delta);
    std::string method = d.both_paths ? "both" : "logdet";
    r.string(j, p, "method", method, {"logdet", "both"});
    d.both_paths = method == "both";
    r.count(j, p, "points", d.points);
    r.number(j, p, "z_kappa0", d.z_kappa0);
    r.require(d.n_lo <= d.n_hi, Reader::at(p, "n_hi"), "must be >= n_lo");
    r.require(d.n_hi - d.n_lo <= 4096, Reader::at(p, "n_hi"), "lattice range is limited to 4097 points");
    r.require(std::isfinite(d.q) && d.q >= 2, Reader::at(p, "q"), "must be finite and >= 2");
    r.require(std::isfinite(d.s) && d.s >= 0, Reader::at(p, "s"), "must be >= 0");
    r.require(std::isfinite(d.kappa0), Reader::at(p, "kappa0"), "must be finite");
    r.require(d.points >= 8 && d.points % 2 == 0, Reader::at(p, "points"), "must be even and >= 8");
    r.require(d.z_kappa0 >= 1, Reader::at(p, "z_kappa0"), "must be >= 1");
}

void read_norms(const Reader& r, const json& j, LabConfig& c) {
    const std::vector<std::string> p = {"norms"};
    r.keys(j, p, {"s", "q", "kappa0", "lebesgue"});
    r.number(j, p, "s", c.norms.s);
    r.number(j, p, "q", c.norms.q);
    r.number(j, p, "kappa0", c.norms.kappa0);
    r.numbers(j, p, "lebesgue", c.norms.lebesgue);
    r.require(std::isfinite(c.norms.q) && c.norms.q >= 2, Reader::at(p, "q"), "must be finite and >= 2");
    r.require(c.norms.kappa0 >= 1, Reader::at(p, "kappa0"), "must be >= 1");
    for (std::size_t i = 0; i < c.norms.lebesgue.size(); ++i)
        r.require(c.norms.lebesgue[i] >= 1, Reader::at(Reader::at(p, "lebesgue"), std::to_string(i)),
                  "exponents must be >= 1");
}

void read_sweep(const Reader& r, const json& j, LabConfig& c) {
    const std::vector<std::string> p = {"sweep"};
    const auto positive_list = [&](const std::string& key, const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            r.require(v[i] > 0 && std::isfinite(v[i]), Reader::at(Reader::at(p, key), std::to_string(i)),
                      "must be positive");
    };
    switch (c.subcommand) {
        case Subcommand::sweep_strichartz: {
            auto& s = c.strichartz;
            r.keys(j, p, {"p", "q", "kind", "levels", "ensemble", "box_length", "points", "envelope_scale",
                          "horizon_scale", "time_samples"});
            r.number(j, p, "p", s.p);
            r.number(j, p, "q", s.q);
            std::string kind = s.kind == biharmonic::PairKind::strichartz ? "strichartz" : "biharmonic";
            r.string(j, p, "kind", kind, {"strichartz", "biharmonic"});
            s.kind = kind == "strichartz" ? biharmonic::PairKind::strichartz : biharmonic::PairKind::biharmonic;
            r.numbers(j, p, "levels", s.levels);
            r.count(j, p, "ensemble", s.ensemble);
            r.number(j, p, "box_length", s.box_length);
            r.count(j, p, "points", s.points);
            r.number(j, p, "envelope_scale", s.envelope_scale);
            r.number(j, p, "horizon_scale", s.horizon_scale);
            r.count(j, p, "time_samples", s.time_samples);
            positive_list("levels", s.levels);
            break;
        }
        case Subcommand::sweep_bilinear: {
            auto& s = c.bilinear;
            r.keys(j, p, {"mode", "levels", "level", "separations", "width", "conjugate", "ensemble",
                          "box_length", "points", "envelope", "crossings", "time_samples"});
            std::string mode = s.mode == biharmonic::BilinearMode::separated ? "separated" : "comparable";
            r.string(j, p, "mode", mode, {"separated", "comparable"});
            s.mode = mode == "separated" ? biharmonic::BilinearMode::separated : biharmonic::BilinearMode::comparable;
            r.numbers(j, p, "levels", s.levels);
            r.number(j, p, "level", s.level);
            r.numbers(j, p, "separations", s.separations);
            r.number(j, p, "width", s.width);
            r.boolean(j, p, "conjugate", s.conjugate);
            r.count(j, p, "ensemble", s.ensemble);
            r.number(j, p, "box_length", s.box_length);
            r.count(j, p, "points", s.points);
            r.number(j, p, "envelope", s.envelope);
            r.number(j, p, "crossings", s.crossings);
            r.count(j, p, "time_samples", s.time_samples);
            positive_list("levels", s.levels);
            positive_list("separations", s.separations);
            break;
        }
        case Subcommand::sweep_l4: {
            auto& s = c.l4;
            r.keys(j, p, {"axis", "offset", "widths", "width", "offsets", "q", "epsilon", "horizon", "ensemble",
                          "box_length", "envelope", "time_samples", "drop_offset_weight"});
            std::string axis = s.axis == biharmonic::IntervalSweepAxis::width ? "width" : "offset";
            r.string(j, p, "axis", axis, {"width", "offset"});
            s.axis = axis == "width" ? biharmonic::IntervalSweepAxis::width : biharmonic::IntervalSweepAxis::offset;
            r.number(j, p, "offset", s.offset);
            r.numbers(j, p, "widths", s.widths);
            r.number(j, p, "width", s.width);
            r.numbers(j, p, "offsets", s.offsets);
            r.number(j, p, "q", s.q);
            r.number(j, p, "epsilon", s.epsilon);
            r.number(j, p, "horizon", s.horizon);
            r.count(j, p, "ensemble", s.ensemble);
            r.number(j, p, "box_length", s.box_length);
            r.number(j, p, "envelope", s.envelope);
            r.count(j, p, "time_samples", s.time_samples);
            r.boolean(j, p, "drop_offset_weight", s.drop_offset_weight);
            positive_list("widths", s.widths);
            break;
        }
        default:
            r.fail(p, "section 'sweep' is only used by the sweep-* subcommands");
    }
}

void read_output(const Reader& r, const json& j, LabConfig& c) {
    const std::vector<std::string> p = {"output"};
    r.keys(j, p, {"plot", "spectra"});
    r.boolean(j, p, "plot", c.output.plot);
    r.boolean(j, p, "spectra", c.output.spectra);
}

void read_input(const Reader& r, const json& j, LabConfig& c) {
    const std::vector<std::string> p = {"input"};
    if (c.subcommand != Subcommand::conservation_report)
        r.fail(p, "section 'input' is only used by conservation-report");
    r.keys(j, p, {"trajectory"});
    r.string(j, p, "trajectory", c.trajectory);
}

}  // namespace

std::optional<Subcommand> parse_subcommand(std::string_view name) {
    for (const auto& [s, n] : kNames)
        if (n == name) return s;
    return std::nullopt;
}

std::string_view subcommand_name(Subcommand s) {
    for (const auto& [k, n] : kNames)
        if (k == s) return n;
    return "?";
}

ConfigError::ConfigError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("config:" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      message_(message),
      line_(line),
      column_(column) {}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

std::optional<std::size_t> locate(std::string_view text, const std::vector<std::string>& path) {
    return Scanner{text}.find(0, path, 0);
}

LabConfig parse_config(std::string_view text, Subcommand subcommand) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points at the last character read.
        const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::string what = e.what();
        if (const auto colon = what.find(": ", what.find("parse error")); colon != std::string::npos)
            what = what.substr(colon + 2);
        throw ConfigError("malformed JSON: " + what, line, column);
    }

    LabConfig c;
    c.subcommand = subcommand;
    const Reader r(text);
    r.keys(doc, {}, {"subcommand", "seed", "grid", "data", "physics", "determinant", "norms", "sweep", "output",
                     "input"});
    if (const json* s = r.child(doc, "subcommand")) {
        if (!s->is_string() || parse_subcommand(s->get<std::string>()) != subcommand)
            r.fail({"subcommand"}, "does not match the requested subcommand '" +
                                       std::string(subcommand_name(subcommand)) + "'");
    }
    r.seed(doc, {}, "seed", c.seed);
    if (const json* j = r.child(doc, "grid")) read_grid(r, *j, c);
    if (const json* j = r.child(doc, "data")) read_data(r, *j, c);
    if (const json* j = r.child(doc, "physics")) read_physics(r, *j, c);
    if (const json* j = r.child(doc, "determinant")) read_determinant(r, *j, c);
    if (const json* j = r.child(doc, "norms")) read_norms(r, *j, c);
    if (const json* j = r.child(doc, "sweep")) read_sweep(r, *j, c);
    if (const json* j = r.child(doc, "output")) read_output(r, *j, c);
    if (const json* j = r.child(doc, "input")) read_input(r, *j, c);
    if (subcommand == Subcommand::conservation_report && c.trajectory.empty())
        r.fail({}, "conservation-report needs input.trajectory");

    c.data.seed = c.seed;
    c.config_hash = fnv1a64(doc.dump());
    return c;
}

}  // namespace lab
