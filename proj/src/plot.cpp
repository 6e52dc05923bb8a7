#include "afcsim/plot.hpp"

#include "afcsim/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

namespace afcsim {

namespace {

const std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape_xml(const std::string& s)
{
    std::string out;
    for (char c : s) {
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

// Round step of roughly span / 6.
double nice_step(double span)
{
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

void put_u32(std::string& out, std::uint32_t v)
{
    out += static_cast<char>((v >> 24) & 0xFF);
    out += static_cast<char>((v >> 16) & 0xFF);
    out += static_cast<char>((v >> 8) & 0xFF);
    out += static_cast<char>(v & 0xFF);
}

void put_chunk(std::string& out, const char* type, const std::string& data)
{
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    std::string body(type, 4);
    body += data;
    out += body;
    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

std::array<std::uint8_t, 3> ramp(double t)
{
    // Viridis anchor colours.
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const auto i = std::min<std::size_t>(3, static_cast<std::size_t>(t));
    const double f = t - static_cast<double>(i);
    std::array<std::uint8_t, 3> c{};
    for (std::size_t k = 0; k < 3; ++k) {
        c[k] = static_cast<std::uint8_t>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
    }
    return c;
}

} // namespace

std::string svg_line_plot(const std::vector<Series>& series, const PlotSpec& spec)
{
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = x0;
    double y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                x0 = std::min(x0, s.x[i]);
                x1 = std::max(x1, s.x[i]);
                y0 = std::min(y0, s.y[i]);
                y1 = std::max(y1, s.y[i]);
            }
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if (x1 <= x0) {
        x1 = x0 + 1.0;
    }
    if (y1 <= y0) {
        y1 = y0 + 1.0;
    }
    y0 = std::min(y0, 0.0);
    y1 += 0.05 * (y1 - y0);

    const double left = 70.0;
    const double right = 20.0;
    const double top = 40.0;
    const double bottom = 50.0;
    const double pw = spec.width - left - right;
    const double ph = spec.height - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(spec.width) + "\" height=\"" +
                      num(spec.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(spec.width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           escape_xml(spec.title) + "</text>\n";
    out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xs = nice_step(x1 - x0);
    for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
        out += "<line x1=\"" + num(px(t)) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(px(t)) + "\" y2=\"" +
               num(top + ph + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(px(t)) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" +
               tick_label(t) + "</text>\n";
    }
    const double ys = nice_step(y1 - y0);
    for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
        out += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(py(t)) + "\" x2=\"" + num(left) + "\" y2=\"" +
               num(py(t)) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(py(t) + 4) + "\" text-anchor=\"end\">" +
               tick_label(t) + "</text>\n";
    }
    out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(spec.height - 10) + "\" text-anchor=\"middle\">" +
           escape_xml(spec.x_label) + "</text>\n";
    out += "<text transform=\"translate(16," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
           escape_xml(spec.y_label) + "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kColors[k % kColors.size()];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                out += num(px(s.x[i])) + ',' + num(py(s.y[i])) + ' ';
            }
        }
        out += "\"/>\n";
        if (!s.label.empty()) {
            const double ly = top + 16.0 + 16.0 * static_cast<double>(k);
            out += "<line x1=\"" + num(left + pw - 150) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
                   num(left + pw - 130) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color + "\"/>\n";
            out += "<text x=\"" + num(left + pw - 125) + "\" y=\"" + num(ly) + "\">" + escape_xml(s.label) +
                   "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

std::string png_heatmap(const std::vector<double>& values, std::size_t rows, std::size_t cols, double vmin,
                        double vmax)
{
    if (rows == 0 || cols == 0 || values.size() != rows * cols) {
        throw InvalidArgument("heatmap dimensions do not match the data");
    }
    const double span = vmax > vmin ? vmax - vmin : 1.0;
    std::string raw;
    raw.reserve(rows * (cols * 3 + 1));
    for (std::size_t r = rows; r-- > 0;) {
        raw += '\0';  // filter: none
        for (std::size_t c = 0; c < cols; ++c) {
            const auto rgb = ramp((values[r * cols + c] - vmin) / span);
            raw.append(reinterpret_cast<const char*>(rgb.data()), 3);
        }
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::string packed(packed_size, '\0');
    if (compress2(reinterpret_cast<Bytef*>(packed.data()), &packed_size, reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 6) != Z_OK) {
        throw Error("PNG compression failed");
    }
    packed.resize(packed_size);

    std::string png("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(cols));
    put_u32(ihdr, static_cast<std::uint32_t>(rows));
    ihdr += static_cast<char>(8);  // bit depth
    ihdr += static_cast<char>(2);  // RGB
    ihdr += std::string(3, '\0');
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", packed);
    put_chunk(png, "IEND", "");
    return png;
}

} // namespace afcsim
