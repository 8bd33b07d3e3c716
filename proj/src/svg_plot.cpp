#include "anobench/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "anobench/taxonomy.hpp"

namespace anobench {

namespace {

// One colour per anomaly type, indexed I..VI.
const char* kTypeColor[6] = {"#d62728", "#9467bd", "#8c564b",
                             "#1f77b4", "#ff7f0e", "#2ca02c"};

// Muted palette for base-case class colouring.
const char* kClassColor[8] = {"#a6cee3", "#fdbf6f", "#b2df8a", "#cab2d6",
                              "#fb9a99", "#d9d9d9", "#ffff99", "#80b1d3"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string render_scatter(const Dataset& dataset, const GroundTruth& truth,
                           const PlotOptions& options) {
    const std::size_t xa = dataset.schema().index_of(options.x_attr);
    const std::size_t ya = dataset.schema().index_of(options.y_attr);
    const auto xs = dataset.continuous(xa);
    const auto ys = dataset.continuous(ya);

    std::optional<std::size_t> color_attr;
    if (options.color_attr) {
        color_attr = dataset.schema().index_of(*options.color_attr);
        if (dataset.schema().attributes[*color_attr].kind !=
            AttributeKind::Categorical) {
            throw ValidationError("plot: colour attribute must be categorical");
        }
    }

    const double margin = 48.0;
    const double w = options.width;
    const double h = options.height;
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    if (!xs.empty()) {
        const auto [a, b] = std::minmax_element(xs.begin(), xs.end());
        const auto [c, d] = std::minmax_element(ys.begin(), ys.end());
        xmin = *a, xmax = *b, ymin = *c, ymax = *d;
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    const auto sx = [&](double v) {
        return margin + (v - xmin) / (xmax - xmin) * (w - 2.0 * margin);
    };
    const auto sy = [&](double v) {
        return h - margin - (v - ymin) / (ymax - ymin) * (h - 2.0 * margin);
    };

    std::map<CaseId, AnomalyType> anomaly_of;
    for (const auto& e : truth.entries) anomaly_of[e.case_id] = e.type;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
        << "\" height=\"" << options.height << "\" viewBox=\"0 0 "
        << options.width << " " << options.height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Axes with range labels.
    svg << "<line x1=\"" << fmt(margin) << "\" y1=\"" << fmt(h - margin)
        << "\" x2=\"" << fmt(w - margin) << "\" y2=\"" << fmt(h - margin)
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fmt(margin) << "\" y1=\"" << fmt(margin)
        << "\" x2=\"" << fmt(margin) << "\" y2=\"" << fmt(h - margin)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(w / 2) << "\" y=\"" << fmt(h - 12)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << options.x_attr
        << " [" << fmt(xmin) << ", " << fmt(xmax) << "]</text>\n";
    svg << "<text x=\"14\" y=\"" << fmt(h / 2)
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << fmt(h / 2) << ")\">" << options.y_attr << " [" << fmt(ymin) << ", "
        << fmt(ymax) << "]</text>\n";

    // Base cases first, anomalies on top as enlarged markers.
    for (std::size_t row = 0; row < dataset.n_cases(); ++row) {
        if (anomaly_of.count(dataset.case_id(row))) continue;
        const char* fill = "#9e9e9e";
        if (color_attr) {
            const auto code = dataset.categorical(*color_attr).code(row);
            fill = kClassColor[code % 8];
        }
        svg << "<circle cx=\"" << fmt(sx(xs[row])) << "\" cy=\""
            << fmt(sy(ys[row])) << "\" r=\"2\" fill=\"" << fill
            << "\" fill-opacity=\"0.7\"/>\n";
    }
    for (std::size_t row = 0; row < dataset.n_cases(); ++row) {
        const auto it = anomaly_of.find(dataset.case_id(row));
        if (it == anomaly_of.end()) continue;
        const int idx = static_cast<int>(it->second) - 1;
        svg << "<circle cx=\"" << fmt(sx(xs[row])) << "\" cy=\""
            << fmt(sy(ys[row])) << "\" r=\"6\" fill=\"" << kTypeColor[idx]
            << "\" stroke=\"black\" stroke-width=\"0.8\"/>\n";
    }

    // Legend: always all six types.
    const double lx = w - margin - 150.0;
    double ly = margin + 4.0;
    svg << "<rect x=\"" << fmt(lx - 8) << "\" y=\"" << fmt(ly - 14)
        << "\" width=\"158\" height=\"118\" fill=\"white\" stroke=\"#666\"/>\n";
    for (AnomalyType t : kAllTypes) {
        const int idx = static_cast<int>(t) - 1;
        svg << "<circle cx=\"" << fmt(lx) << "\" cy=\"" << fmt(ly)
            << "\" r=\"5\" fill=\"" << kTypeColor[idx] << "\"/>\n";
        svg << "<text x=\"" << fmt(lx + 12) << "\" y=\"" << fmt(ly + 4)
            << "\" font-size=\"11\">Type " << roman(t) << " ("
            << type_name(t) << ")</text>\n";
        ly += 18.0;
    }

    svg << "</svg>\n";
    return svg.str();
}

}  // namespace anobench
