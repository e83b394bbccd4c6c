#include "twt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "twt/errors.hpp"

namespace twt::svg {

namespace {
constexpr int kWidth = 900;
constexpr int kHeight = 420;
constexpr int kMarginL = 70, kMarginR = 160, kMarginT = 40, kMarginB = 45;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}
}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      std::span<const double> x, const std::vector<Series>& series,
                      int max_points) {
    if (x.empty() || series.empty()) throw ConfigError("svg: nothing to plot");

    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    for (const Series& s : series)
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (!(ymax > ymin)) {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    const double xmin = x.front(), xmax = x.back();

    const double plot_w = kWidth - kMarginL - kMarginR;
    const double plot_h = kHeight - kMarginT - kMarginB;
    auto px = [&](double v) { return kMarginL + (v - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double v) { return kMarginT + (ymax - v) / (ymax - ymin) * plot_h; };

    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path);
    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' font-family='sans-serif' font-size='12'>\n";
    f << "<rect width='100%' height='100%' fill='white'/>\n";
    f << "<text x='" << kMarginL << "' y='22' font-size='15'>" << title << "</text>\n";

    // frame + ticks
    f << "<rect x='" << kMarginL << "' y='" << kMarginT << "' width='" << plot_w << "' height='"
      << plot_h << "' fill='none' stroke='#444'/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double tx = xmin + (xmax - xmin) * i / 5.0;
        const double ty = ymin + (ymax - ymin) * i / 5.0;
        f << "<line x1='" << px(tx) << "' y1='" << kMarginT + plot_h << "' x2='" << px(tx)
          << "' y2='" << kMarginT + plot_h + 5 << "' stroke='#444'/>\n";
        f << "<text x='" << px(tx) << "' y='" << kMarginT + plot_h + 18
          << "' text-anchor='middle'>" << fmt(tx) << "</text>\n";
        f << "<line x1='" << kMarginL - 5 << "' y1='" << py(ty) << "' x2='" << kMarginL
          << "' y2='" << py(ty) << "' stroke='#444'/>\n";
        f << "<text x='" << kMarginL - 8 << "' y='" << py(ty) + 4 << "' text-anchor='end'>"
          << fmt(ty) << "</text>\n";
    }

    const std::size_t stride =
        std::max<std::size_t>(1, x.size() / static_cast<std::size_t>(max_points));
    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const char* color = kColors[si % 6];
        f << "<polyline fill='none' stroke='" << color << "' stroke-width='1.2' points='";
        for (std::size_t k = 0; k < x.size(); k += stride) {
            const double v = s.y[std::min(k, s.y.size() - 1)];
            if (!std::isfinite(v)) continue;
            f << fmt(px(x[k])) << ',' << fmt(py(v)) << ' ';
        }
        f << "'/>\n";
        const double ly = kMarginT + 16.0 * static_cast<double>(si) + 8.0;
        f << "<line x1='" << kWidth - kMarginR + 10 << "' y1='" << ly << "' x2='"
          << kWidth - kMarginR + 30 << "' y2='" << ly << "' stroke='" << color
          << "' stroke-width='2'/>\n";
        f << "<text x='" << kWidth - kMarginR + 35 << "' y='" << ly + 4 << "'>" << s.label
          << "</text>\n";
    }
    f << "</svg>\n";
}

}  // namespace twt::svg
