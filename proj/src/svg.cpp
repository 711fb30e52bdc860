#include "cpci/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cpci {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Panel {
    const char* title;
    double AggregateRow::*mean;
};

struct Series {
    std::string method;
    std::vector<std::pair<double, double>> points;  // (n, value)
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

std::string plot_panels_svg(const std::vector<AggregateRow>& rows) {
    const Panel panels[4] = {
        {"Coverage", &AggregateRow::coverage_mean},
        {"Average interval length", &AggregateRow::avg_length_mean},
        {"Proportion of sets containing 0", &AggregateRow::prop_zero_mean},
        {"Average non-zero length", &AggregateRow::nonzero_length_mean},
    };

    std::vector<std::string> methods;
    for (const auto& r : rows)
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);

    const double panel_w = 360, panel_h = 260, margin = 56, gap = 36;
    const double width = 2 * panel_w + 3 * gap;
    const double legend_h = 24.0 * static_cast<double>((methods.size() + 3) / 4) + 16;
    const double height = 2 * (panel_h + gap) + gap + legend_h;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (int p = 0; p < 4; ++p) {
        const double ox = gap + (p % 2) * (panel_w + gap);
        const double oy = gap + (p / 2) * (panel_h + gap);
        const double ax = ox + margin, ay = oy + 24;
        const double aw = panel_w - margin - 12, ah = panel_h - 24 - 36;

        std::vector<Series> series;
        double x_min = kInf, x_max = -kInf, y_min = kInf, y_max = -kInf;
        for (const auto& m : methods) {
            Series s;
            s.method = m;
            for (const auto& r : rows) {
                if (r.method != m) continue;
                const double v = r.*(panels[p].mean);
                if (!std::isfinite(v)) continue;
                if (p == 3 && r.nonzero_length_count == 0) continue;
                s.points.emplace_back(static_cast<double>(r.n_total), v);
            }
            std::sort(s.points.begin(), s.points.end());
            for (const auto& [x, y] : s.points) {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
            series.push_back(std::move(s));
        }
        const bool have_data = x_min <= x_max;
        if (!have_data) {
            x_min = 0, x_max = 1, y_min = 0, y_max = 1;
        }
        if (x_min == x_max) {
            x_min -= 1;
            x_max += 1;
        }
        if (y_min == y_max) {
            y_min -= 0.5;
            y_max += 0.5;
        }
        const double pad = 0.05 * (y_max - y_min);
        y_min -= pad;
        y_max += pad;

        auto sx = [&](double x) { return ax + (x - x_min) / (x_max - x_min) * aw; };
        auto sy = [&](double y) { return ay + ah - (y - y_min) / (y_max - y_min) * ah; };

        svg << "<text x=\"" << ox + panel_w / 2 << "\" y=\"" << oy + 14
            << "\" text-anchor=\"middle\" font-weight=\"bold\">(" << static_cast<char>('A' + p)
            << ") " << panels[p].title << "</text>\n";
        svg << "<rect x=\"" << ax << "\" y=\"" << ay << "\" width=\"" << aw << "\" height=\""
            << ah << "\" fill=\"none\" stroke=\"black\"/>\n";
        // axis extremes
        svg << "<text x=\"" << ax - 6 << "\" y=\"" << sy(y_min) << "\" text-anchor=\"end\">"
            << fmt(y_min) << "</text>\n";
        svg << "<text x=\"" << ax - 6 << "\" y=\"" << sy(y_max) + 10
            << "\" text-anchor=\"end\">" << fmt(y_max) << "</text>\n";
        svg << "<text x=\"" << sx(x_min) << "\" y=\"" << ay + ah + 16
            << "\" text-anchor=\"middle\">" << fmt(x_min) << "</text>\n";
        svg << "<text x=\"" << sx(x_max) << "\" y=\"" << ay + ah + 16
            << "\" text-anchor=\"middle\">" << fmt(x_max) << "</text>\n";
        svg << "<text x=\"" << ax + aw / 2 << "\" y=\"" << ay + ah + 30
            << "\" text-anchor=\"middle\">n</text>\n";

        for (std::size_t si = 0; si < series.size(); ++si) {
            const auto& s = series[si];
            const char* color = kPalette[si % 8];
            if (s.points.size() > 1) {
                svg << "<polyline fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.5\" points=\"";
                for (const auto& [x, y] : s.points) svg << sx(x) << ',' << sy(y) << ' ';
                svg << "\"/>\n";
            }
            for (const auto& [x, y] : s.points)
                svg << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y)
                    << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        }
    }

    // legend
    const double ly = 2 * (panel_h + gap) + gap;
    for (std::size_t si = 0; si < methods.size(); ++si) {
        const double lx = gap + static_cast<double>(si % 4) * 190.0;
        const double row_y = ly + 24.0 * static_cast<double>(si / 4);
        svg << "<rect x=\"" << lx << "\" y=\"" << row_y << "\" width=\"14\" height=\"14\" fill=\""
            << kPalette[si % 8] << "\"/>\n";
        svg << "<text x=\"" << lx + 20 << "\" y=\"" << row_y + 12 << "\">" << methods[si]
            << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

}  // namespace cpci
