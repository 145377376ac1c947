#include "dirty/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace dirty {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 60, kRight = 170, kTop = 20, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label_for(const SweepPoint& pt) {
    std::ostringstream os;
    os << to_string(pt.method) << " p=" << pt.p;
    char buf[32];
    std::snprintf(buf, sizeof buf, " a=%.3g", pt.alpha);
    os << buf;
    return os.str();
}

} // namespace

std::string render_svg(const SweepTable& table) {
    if (table.empty())
        throw std::invalid_argument("cannot plot an empty sweep table");

    using Key = std::tuple<int, std::size_t, std::size_t, double>;
    std::vector<Key> order;
    std::map<Key, std::vector<const SweepPoint*>> curves;
    double lo = table.front().theta, hi = lo;
    for (const auto& pt : table) {
        Key key{static_cast<int>(pt.method), pt.p, pt.s, pt.alpha};
        if (!curves.count(key))
            order.push_back(key);
        curves[key].push_back(&pt);
        lo = std::min(lo, pt.theta);
        hi = std::max(hi, pt.theta);
    }
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double t) { return kLeft + (t - lo) / (hi - lo) * plot_w; };
    auto sy = [&](double rate) { return kTop + (1.0 - rate) * plot_h; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<g stroke=\"black\" fill=\"none\">\n"
       << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
       << kTop + plot_h << "\"/>\n"
       << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
       << "\"/>\n</g>\n";

    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double rate = i / 4.0;
        os << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(sy(rate) + 4) << "\" text-anchor=\"end\">" << num(rate)
           << "</text>\n";
        const double t = lo + (hi - lo) * i / 4.0;
        os << "<text x=\"" << num(sx(t)) << "\" y=\"" << kTop + plot_h + 16 << "\" text-anchor=\"middle\">"
           << num(t) << "</text>\n";
    }
    os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
       << "\" text-anchor=\"middle\">theta</text>\n"
       << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << kTop + plot_h / 2 << ")\">success rate</text>\n</g>\n";

    for (std::size_t c = 0; c < order.size(); ++c) {
        auto pts = curves[order[c]];
        std::stable_sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->theta < b->theta; });
        const char* color = kColors[c % std::size(kColors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            os << (i ? " " : "") << num(sx(pts[i]->theta)) << ',' << num(sy(pts[i]->success_rate()));
        os << "\"/>\n";
    }

    os << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (std::size_t c = 0; c < order.size(); ++c) {
        const double y = kTop + 10 + 18.0 * static_cast<double>(c);
        const double x = kLeft + plot_w + 12;
        os << "<line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + 20 << "\" y2=\"" << y << "\" stroke=\""
           << kColors[c % std::size(kColors)] << "\" stroke-width=\"2\"/>"
           << "<text x=\"" << x + 26 << "\" y=\"" << y + 4 << "\">" << label_for(*curves[order[c]].front())
           << "</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

void emit_svg(const SweepTable& table, const std::filesystem::path& path) {
    const std::string doc = render_svg(table);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << doc;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

} // namespace dirty
