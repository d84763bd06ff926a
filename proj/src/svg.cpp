#include "persona_lab/svg.hpp"

#include "persona_lab/util.hpp"

#include <algorithm>
#include <cmath>

namespace persona_lab::svg {

namespace {

constexpr const char *kCreativeColor = "#d95f02";
constexpr const char *kAnalyticalColor = "#1b9e77";

const char *color_of(Group g) { return g == Group::Creative ? kCreativeColor : kAnalyticalColor; }

std::string num(double v) { return format_fixed(v, 2); }

std::string escape(std::string_view s) {
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

std::string header(double w, double h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\" font-family=\"sans-serif\" font-size=\"11\">\n" +
           "<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"white\"/>\n";
}

std::string text(double x, double y, std::string_view s, const char *anchor = "middle", int size = 11) {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\" font-size=\"" +
           std::to_string(size) + "\">" + escape(s) + "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const char *stroke = "black") {
    return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
           "\" stroke=\"" + stroke + "\"/>\n";
}

std::pair<double, double> padded_range(double lo, double hi) {
    if (!(hi > lo)) {
        return {lo - 1.0, hi + 1.0};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

std::string legend(double x, double y) {
    std::string out;
    int row = 0;
    for (Group g : {Group::Creative, Group::Analytical}) {
        const double yy = y + 16.0 * row++;
        out += "<rect x=\"" + num(x) + "\" y=\"" + num(yy - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
               color_of(g) + "\"/>\n";
        out += text(x + 14, yy, group_name(g), "start");
    }
    return out;
}

double quantile(const std::vector<double> &sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace

std::string pca_scatter(const std::vector<ScatterPoint> &points, const std::vector<double> &explained_ratio,
                        const std::string &title) {
    constexpr double W = 520, H = 440, L = 60, R = 110, T = 40, B = 50;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    if (!points.empty()) {
        const auto [xl, xh] = std::ranges::minmax(points, {}, &ScatterPoint::x);
        const auto [yl, yh] = std::ranges::minmax(points, {}, &ScatterPoint::y);
        std::tie(xmin, xmax) = padded_range(xl.x, xh.x);
        std::tie(ymin, ymax) = padded_range(yl.y, yh.y);
    } else {
        std::tie(xmin, xmax) = padded_range(0, 0);
        std::tie(ymin, ymax) = padded_range(0, 0);
    }
    const auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    const auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    std::string out = header(W, H);
    out += text(W / 2, 22, title, "middle", 14);
    out += "<rect x=\"" + num(L) + "\" y=\"" + num(T) + "\" width=\"" + num(W - L - R) + "\" height=\"" +
           num(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
    const auto pct = [&](std::size_t i) {
        return i < explained_ratio.size() ? " (" + format_fixed(100.0 * explained_ratio[i], 1) + "%)" : std::string();
    };
    out += text(L + (W - L - R) / 2, H - 14, "PC1" + pct(0));
    out += "<text x=\"16\" y=\"" + num(T + (H - T - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           num(T + (H - T - B) / 2) + ")\">PC2" + pct(1) + "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        out += line(px(xv), H - B, px(xv), H - B + 4) + text(px(xv), H - B + 16, format_fixed(xv, 2));
        out += line(L - 4, py(yv), L, py(yv)) + text(L - 6, py(yv) + 4, format_fixed(yv, 2), "end");
    }
    for (const auto &p : points) {
        out += "<circle cx=\"" + num(px(p.x)) + "\" cy=\"" + num(py(p.y)) + "\" r=\"3\" fill=\"" + color_of(p.group) +
               "\" fill-opacity=\"0.7\"/>\n";
    }
    out += legend(W - R + 12, T + 12);
    out += "</svg>\n";
    return out;
}

BoxStats box_stats(std::vector<double> values) {
    BoxStats s;
    if (values.empty()) {
        return s;
    }
    std::ranges::sort(values);
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr;
    const double hi_fence = s.q3 + 1.5 * iqr;
    s.whisker_low = s.q1;
    s.whisker_high = s.q3;
    for (double v : values) {
        if (v < lo_fence || v > hi_fence) {
            s.outliers.push_back(v);
        } else {
            s.whisker_low = std::min(s.whisker_low, v);
            s.whisker_high = std::max(s.whisker_high, v);
        }
    }
    return s;
}

std::string boxplots(const std::vector<std::pair<std::string, std::vector<BoxSeries>>> &panels,
                     const std::string &title) {
    constexpr double PW = 200, PH = 300, L = 50, T = 50, B = 90, Gap = 20;
    const double W = L + panels.size() * (PW + Gap) + 100;
    const double H = T + PH + B;

    double lo = 0, hi = 0;
    bool first = true;
    for (const auto &[_, series] : panels) {
        for (const auto &s : series) {
            for (double v : s.values) {
                lo = first ? v : std::min(lo, v);
                hi = first ? v : std::max(hi, v);
                first = false;
            }
        }
    }
    std::tie(lo, hi) = padded_range(lo, hi);
    const auto py = [&](double v) { return T + PH - (v - lo) / (hi - lo) * PH; };

    std::string out = header(W, H);
    out += text(W / 2, 22, title, "middle", 14);
    for (int i = 0; i <= 5; ++i) {
        const double v = lo + (hi - lo) * i / 5.0;
        out += line(L - 4, py(v), L, py(v)) + text(L - 6, py(v) + 4, format_fixed(v, 1), "end");
    }
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto &[name, series] = panels[p];
        const double x0 = L + p * (PW + Gap);
        out += "<rect x=\"" + num(x0) + "\" y=\"" + num(T) + "\" width=\"" + num(PW) + "\" height=\"" + num(PH) +
               "\" fill=\"none\" stroke=\"black\"/>\n";
        out += text(x0 + PW / 2, T - 8, name, "middle", 12);
        const double slot = series.empty() ? PW : PW / series.size();
        for (std::size_t i = 0; i < series.size(); ++i) {
            const auto &s = series[i];
            const double cx = x0 + slot * (i + 0.5);
            const double bw = slot * 0.6;
            out += "<text x=\"" + num(cx) + "\" y=\"" + num(T + PH + 12) + "\" text-anchor=\"end\" font-size=\"9\" " +
                   "transform=\"rotate(-45 " + num(cx) + " " + num(T + PH + 12) + ")\">" + escape(s.label) +
                   "</text>\n";
            if (s.values.empty()) {
                continue;
            }
            const auto b = box_stats(s.values);
            out += line(cx, py(b.whisker_low), cx, py(b.q1)) + line(cx, py(b.q3), cx, py(b.whisker_high));
            out += line(cx - bw / 4, py(b.whisker_low), cx + bw / 4, py(b.whisker_low));
            out += line(cx - bw / 4, py(b.whisker_high), cx + bw / 4, py(b.whisker_high));
            out += "<rect x=\"" + num(cx - bw / 2) + "\" y=\"" + num(py(b.q3)) + "\" width=\"" + num(bw) +
                   "\" height=\"" + num(py(b.q1) - py(b.q3)) + "\" fill=\"" + color_of(s.group) +
                   "\" fill-opacity=\"0.5\" stroke=\"black\"/>\n";
            out += line(cx - bw / 2, py(b.median), cx + bw / 2, py(b.median));
            for (double v : b.outliers) {
                out += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(py(v)) + "\" r=\"2\" fill=\"none\" stroke=\"black\"/>\n";
            }
        }
    }
    out += legend(W - 90, T + 12);
    out += "</svg>\n";
    return out;
}

} // namespace persona_lab::svg
