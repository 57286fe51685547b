#include "lab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace lab {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s = "0x0000000000000000";
    for (int i = 17; i >= 2; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

std::string Provenance::line() const {
    return "subcommand=" + subcommand + " config_hash=" + hex64(config_hash) +
           " seed=" + std::to_string(seed);
}

CsvWriter::CsvWriter(const Provenance& provenance, std::vector<std::string> columns)
    : columns_(columns.size()) {
    text_ = "# " + provenance.line() + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) text_ += ',';
        text_ += columns[i];
    }
    text_ += '\n';
}

CsvWriter& CsvWriter::cell(std::string_view v) {
    if (filled_) text_ += ',';
    if (v.find_first_of(",\"\n") != std::string_view::npos) {
        text_ += '"';
        for (const char c : v) {
            if (c == '"') text_ += '"';
            text_ += c;
        }
        text_ += '"';
    } else {
        text_ += v;
    }
    ++filled_;
    return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_double(v))); }
CsvWriter& CsvWriter::cell(std::int64_t v) { return cell(std::string_view(std::to_string(v))); }
CsvWriter& CsvWriter::cell(bool v) { return cell(std::string_view(v ? "1" : "0")); }

void CsvWriter::end_row() {
    if (filled_ != columns_)
        throw std::logic_error("csv row has " + std::to_string(filled_) + " cells, expected " +
                               std::to_string(columns_));
    text_ += '\n';
    filled_ = 0;
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fixed(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return {buf, r.ptr};
}

}  // namespace

std::string loglog_svg(const Provenance& provenance, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series) {
    constexpr double W = 640, H = 440, left = 80, right = 20, top = 40, bottom = 60;
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!(s.x[i] > 0) || !(s.y[i] > 0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                continue;
            xlo = std::min(xlo, std::log10(s.x[i]));
            xhi = std::max(xhi, std::log10(s.x[i]));
            ylo = std::min(ylo, std::log10(s.y[i]));
            yhi = std::max(yhi, std::log10(s.y[i]));
        }
    if (!(xlo <= xhi)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    xlo = std::floor(xlo), xhi = std::max(std::ceil(xhi), xlo + 1);
    ylo = std::floor(ylo), yhi = std::max(std::ceil(yhi), ylo + 1);
    const auto px = [&](double v) { return left + (std::log10(v) - xlo) / (xhi - xlo) * (W - left - right); };
    const auto py = [&](double v) { return H - bottom - (std::log10(v) - ylo) / (yhi - ylo) * (H - top - bottom); };

    static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::string o;
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\">\n";
    o += "<!-- " + provenance.line() + " -->\n";
    o += "<desc>" + escape_xml(provenance.line()) + "</desc>\n";
    o += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
    o += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape_xml(title) + "</text>\n";
    for (double d = xlo; d <= xhi + 1e-9; d += 1) {
        const double x = left + (d - xlo) / (xhi - xlo) * (W - left - right);
        o += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(x) + "\" y2=\"" +
             fixed(H - bottom) + "\" stroke=\"#ddd\"/>\n";
        o += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(H - bottom + 18) +
             "\" text-anchor=\"middle\" font-size=\"11\">1e" + std::to_string(static_cast<int>(d)) + "</text>\n";
    }
    for (double d = ylo; d <= yhi + 1e-9; d += 1) {
        const double y = H - bottom - (d - ylo) / (yhi - ylo) * (H - top - bottom);
        o += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(W - right) +
             "\" y2=\"" + fixed(y) + "\" stroke=\"#ddd\"/>\n";
        o += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(y + 4) +
             "\" text-anchor=\"end\" font-size=\"11\">1e" + std::to_string(static_cast<int>(d)) + "</text>\n";
    }
    o += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(W - left - right) +
         "\" height=\"" + fixed(H - top - bottom) + "\" fill=\"none\" stroke=\"black\"/>\n";
    o += "<text x=\"" + fixed((left + W - right) / 2) + "\" y=\"" + fixed(H - 16) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + escape_xml(x_label) + "</text>\n";
    o += "<text x=\"18\" y=\"" + fixed((top + H - bottom) / 2) + "\" text-anchor=\"middle\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " + fixed((top + H - bottom) / 2) + ")\">" + escape_xml(y_label) + "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const std::string colour = palette[k % 5];
        std::string path;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!(s.x[i] > 0) || !(s.y[i] > 0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                continue;
            if (s.points_only) {
                o += "<circle cx=\"" + fixed(px(s.x[i])) + "\" cy=\"" + fixed(py(s.y[i])) +
                     "\" r=\"2\" fill=\"" + colour + "\" fill-opacity=\"0.5\"/>\n";
            } else {
                path += (path.empty() ? "M" : " L") + fixed(px(s.x[i])) + " " + fixed(py(s.y[i]));
            }
        }
        if (!path.empty())
            o += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\"/>\n";
        o += "<text x=\"" + fixed(left + 10) + "\" y=\"" + fixed(top + 16 + 14 * static_cast<double>(k)) +
             "\" font-size=\"11\" fill=\"" + colour + "\">" + escape_xml(s.label) + "</text>\n";
    }
    o += "</svg>\n";
    return o;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace lab
